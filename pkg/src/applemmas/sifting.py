"""Sifting: random translates of A cut out large structured pieces whose sums land in a popular set."""
import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.verdicts import HypothesisCheck, LemmaVerdict
from src.config import COMPLEX_TOL, DEFAULT_SEED
from src.errors import ConstantsMismatch, ContractError, InputError
from src.harmonics.fourier import (
    autocorrelation,
    difference_set,
    fourfold_measure,
    integer_convolve,
    lp_norm,
    sumset,
)
from src.harmonics.groups import GroupSubset
from src.validation.validator import HypothesisValidator


class SiftOutput(BaseModel):
    """The sifted pieces T = A'' n (B2 + z) and S = -(A'' n (w + B1)) with their measurements."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    T: GroupSubset = Field(exclude=True)
    S: GroupSubset = Field(exclude=True)
    D: GroupSubset = Field(exclude=True)
    z: int
    w: int
    samples: list[int]
    density_T: float
    density_S: float
    correlation: float
    attempts: int
    anchored: bool
    checks: list[HypothesisCheck] = Field(default_factory=list)

    def to_json(self) -> dict:
        return {
            **self.model_dump(),
            "T": self.T.members(),
            "S": self.S.members(),
            "D": self.D.members(),
        }


def popular_differences(A: GroupSubset, B0: GroupSubset, B1: GroupSubset, B2: GroupSubset, epsilon: float):
    """D = {u in -B1 - B2 + B2 + B1 : 1_{A'} * 1_{-A'}(u) > (1 + eps/2) alpha^2 mu(B0)}."""
    inside = A & B0
    alpha = inside.size / B0.size
    window = difference_set(sumset(B2, B1), sumset(B2, B1))
    threshold = (1 + epsilon / 2) * alpha**2 * B0.density
    mask = window.mask & (autocorrelation(inside) > threshold + COMPLEX_TOL * B0.density)
    return GroupSubset(group=A.group, mask=mask)


def pair_correlation(T: GroupSubset, S: GroupSubset, D: GroupSubset) -> float:
    """<1_D, mu_T * mu_S>: the share of pairs (t, s) with t + s in D."""
    if T.is_empty() or S.is_empty():
        return 0.0
    counts = integer_convolve(T.mask, S.mask, T.group)
    return float(counts[D.mask].sum()) / (T.size * S.size)


def _draw(rng: np.random.Generator, pool: list[int], count: int) -> list[int]:
    return [int(pool[i]) for i in rng.integers(0, len(pool), size=count)]


def sift(
    A: GroupSubset,
    B0: GroupSubset,
    B1: GroupSubset,
    B2: GroupSubset,
    k: int,
    alpha: float,
    epsilon: float,
    kappa: float,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
    anchored: bool = True,
) -> SiftOutput:
    """
    Sample x_1..x_2k from B0, intersect the translates x_i - A', and scan (z, w) in B1 x B2.

    A draw succeeds when T and S both have relative density at least
    alpha^{4k} and <1_D, mu_T * mu_S> >= 1 - kappa. In anchored mode the
    x_i are drawn from B0 n A' so that 0 lies in every translate. Draws are
    repeated up to the book's retry budget.

    Raises:
        InputError: for out-of-range parameters
        HypothesisFail: when a measured hypothesis does not hold
        ConstantsMismatch: when the retry budget runs out
    """
    if k < 1:
        raise InputError(f"k must be a positive integer, got {k}")
    if not 0 < epsilon <= 1 or not 0 < kappa <= 1:
        raise InputError(f"epsilon and kappa must lie in (0, 1], got {epsilon}, {kappa}")
    if B0.is_empty() or B1.is_empty() or B2.is_empty():
        raise InputError("B0, B1, B2 must be nonempty")

    group = A.group
    inside = A & B0
    measured_alpha = inside.size / B0.size
    mu = fourfold_measure(B1, B2)
    scale = measured_alpha**2 * B0.density

    validator = HypothesisValidator("sift")
    validator.require("alpha", abs(measured_alpha - alpha), "<=", COMPLEX_TOL)
    validator.require("alpha positive", measured_alpha, ">=", COMPLEX_TOL)
    validator.require("k", k, ">=", book.C_rdc / epsilon * math.log(2 / kappa))
    validator.require(
        "B2 + B1 + B0 growth", sumset(sumset(B2, B1), B0).size / B0.size, "<=", 1 + epsilon * alpha**2 / 4
    )
    validator.require(
        "L_2k norm of the difference function", lp_norm(autocorrelation(inside), mu, 2 * k),
        ">=", (1 + epsilon) * scale,
    )
    checks = validator.raise_if_failed()

    D = popular_differences(A, B0, B1, B2, epsilon)
    floor = alpha ** (4 * k)
    pool = (inside if anchored else B0).members()
    rng = np.random.default_rng(seed)
    best = 0.0

    for attempt in range(1, book.retry_budget + 1):
        samples = _draw(rng, pool, 2 * k)
        sifted = GroupSubset.full(group)
        for x in samples:
            sifted = sifted & inside.negate().translate(x)
        if sifted.is_empty():
            continue
        for z in B1.members():
            T = sifted & B2.translate(z)
            density_T = T.size / B2.size
            if density_T < floor or T.is_empty():
                continue
            for w in B2.members():
                piece = sifted & B1.translate(w)
                density_S = piece.size / B1.size
                if density_S < floor or piece.is_empty():
                    continue
                S = piece.negate()
                correlation = pair_correlation(T, S, D)
                best = max(best, correlation)
                if correlation >= 1 - kappa - COMPLEX_TOL:
                    logger.debug(f"sift: draw {attempt} succeeded at z={z}, w={w} (corr {correlation:.4f})")
                    return SiftOutput(
                        T=T, S=S, D=D, z=z, w=w, samples=samples,
                        density_T=density_T, density_S=density_S, correlation=correlation,
                        attempts=attempt, anchored=anchored, checks=checks,
                    )
        logger.debug(f"sift: draw {attempt} found no piece (best correlation so far {best:.4f})")

    raise ConstantsMismatch(
        f"sifting found no piece in {book.retry_budget} draws",
        best_correlation=best,
        draws=book.retry_budget,
        popular=D.size,
        anchored=anchored,
    )


def sift_check(
    A: GroupSubset,
    B0: GroupSubset,
    B1: GroupSubset,
    B2: GroupSubset,
    k: int,
    epsilon: float,
    kappa: float,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
    anchored: bool = True,
) -> LemmaVerdict:
    """Run sift and re-measure its output from scratch."""
    alpha = (A & B0).size / B0.size
    out = sift(A, B0, B1, B2, k, alpha, epsilon, kappa, book=book, seed=seed, anchored=anchored)
    D = popular_differences(A, B0, B1, B2, epsilon)
    placed = out.T.issubset(B2.translate(out.z)) and out.S.negate().issubset(B1.translate(out.w))
    validator = HypothesisValidator("sift output")
    validator.require_true("pieces inside the translated Bohr sets", placed)
    validator.require("density of T", out.T.size / B2.size, ">=", alpha ** (4 * k))
    validator.require("density of S", out.S.size / B1.size, ">=", alpha ** (4 * k))
    if not validator.validate()[0]:
        raise ContractError("sifted pieces fail their size or placement guarantees", z=out.z, w=out.w)
    return LemmaVerdict.conclude(
        "sift", out.checks + validator.checks, lhs=pair_correlation(out.T, out.S, D), rhs=1 - kappa,
        book=book, seed=seed,
        attempts=out.attempts, z=out.z, w=out.w, size_T=out.T.size, size_S=out.S.size,
    )
