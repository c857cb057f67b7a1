"""Local almost periodicity: a dense set of translates that barely move f * mu_S in L_p(mu_T)."""
import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.verdicts import LemmaVerdict
from src.config import COMPLEX_TOL, DEFAULT_SEED
from src.errors import InputError
from src.harmonics.fourier import difference_set, lp_norm, smooth, sumset
from src.harmonics.groups import DensityWeight, GroupSubset
from src.validation.validator import HypothesisValidator

MAX_DRAWS = 10**15  # multinomial draws stay inside int64


class AlmostPeriodSet(BaseModel):
    """t in B0 and X inside B0 - t whose translates move f * mu_S by at most eps M in L_p(mu_T)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    t: int
    X: GroupSubset = Field(exclude=True)
    density: float
    density_bound: float
    worst_shift: float
    budget: float
    sup_norm: float
    samples: int
    sample_error: float
    sample_threshold: float
    p: float
    L: float
    K: float
    epsilon: float

    def to_json(self) -> dict:
        return {**self.model_dump(), "X": self.X.members()}


def sample_count(p: float, L: float, epsilon: float, book: ConstantBook = DEFAULT_BOOK) -> int:
    """k = ceil(64 C_mzi eps^-2 L^{2/p} p)."""
    return math.ceil(64 * book.C_mzi * L ** (2 / p) * p / epsilon**2)


def local_sup_norm(f: np.ndarray, S: GroupSubset, window: GroupSubset, p: float) -> float:
    """sup over s in S of ||f||_{L_p(mu_{window - s})}."""
    return max(lp_norm(f, DensityWeight.uniform_on(window.translate(-s)), p) for s in S.members())


def croot_sisask(
    f: np.ndarray,
    S: GroupSubset,
    T: GroupSubset,
    B0: GroupSubset,
    p: float,
    L: float,
    K: float,
    epsilon: float,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
) -> AlmostPeriodSet:
    """
    Find t in B0 and X inside B0 - t with ||rho_x(f * mu_S) - f * mu_S||_{L_p(mu_T)} <= eps M on X.

    M is sup over s in S of ||f||_{L_p(mu_{T + B0 - B0 - s})}. X is found by
    testing every shift in B0 - B0 directly, and t maximises |X n (B0 - t)|
    with ties going to the smallest t. The random sample of k translates is
    drawn as a multinomial count vector and its error is reported next to
    the threshold (eps/4) M L^{-1/p} that the averaging argument guarantees
    in mean.

    Raises:
        InputError: for out-of-range parameters
        HypothesisFail: when a measured hypothesis does not hold
    """
    if min(p, L, K) < 2:
        raise InputError(f"p, L, K must be at least 2, got {p}, {L}, {K}")
    if not 0 < epsilon <= 1:
        raise InputError(f"epsilon must lie in (0, 1], got {epsilon}")
    if S.is_empty() or T.is_empty() or B0.is_empty():
        raise InputError("S, T, B0 must be nonempty")

    group = S.group
    window = sumset(T, difference_set(B0, B0))
    validator = HypothesisValidator("croot-sisask")
    validator.require("T + B0 - B0 growth", window.size / T.size, "<=", L)
    validator.require("S + B0 growth", sumset(S, B0).size / S.size, "<=", K)
    validator.raise_if_failed()

    f = np.asarray(f, dtype=np.float64)
    smoothed = smooth(f, DensityWeight.uniform_on(S))
    M = local_sup_norm(f, S, window, p)

    k = sample_count(p, L, epsilon, book)
    rng = np.random.default_rng(seed)
    draws = min(k, MAX_DRAWS)
    counts = rng.multinomial(draws, np.full(S.size, 1.0 / S.size))
    empirical = np.zeros(group.order)
    empirical[S.members()] = counts / draws
    sampled = smooth(f, DensityWeight(group=group, weights=empirical))
    sample_error = lp_norm(sampled - smoothed, DensityWeight.uniform_on(window), p)
    sample_threshold = epsilon / 4 * M / L ** (1 / p)

    shifts = difference_set(B0, B0)
    budget = epsilon * M
    mu_T = DensityWeight.uniform_on(T)
    good = np.zeros(group.order, dtype=bool)
    moved = np.zeros(group.order)
    for x in shifts.members():
        moved[x] = lp_norm(smoothed[group.translate_index(x)] - smoothed, mu_T, p)
        good[x] = moved[x] <= budget + COMPLEX_TOL

    best_t, best_X = None, None
    for t in B0.members():
        X = GroupSubset(group=group, mask=good) & B0.translate(-t)
        if best_X is None or X.size > best_X.size:
            best_t, best_X = t, X

    density = best_X.size / B0.size
    bound = K ** (-book.C_csl * L ** (2 / p) * p / epsilon**2)
    worst = float(moved[best_X.mask].max(initial=0.0))
    logger.debug(
        f"croot-sisask: t={best_t}, |X|={best_X.size}, density {density:.4g} against bound {bound:.4g}"
    )
    return AlmostPeriodSet(
        t=best_t, X=best_X, density=density, density_bound=bound, worst_shift=worst, budget=budget,
        sup_norm=M, samples=k, sample_error=sample_error, sample_threshold=sample_threshold,
        p=p, L=L, K=K, epsilon=epsilon,
    )


def croot_sisask_check(
    f: np.ndarray,
    S: GroupSubset,
    T: GroupSubset,
    B0: GroupSubset,
    p: float,
    L: float,
    K: float,
    epsilon: float,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
) -> LemmaVerdict:
    """croot_sisask as a verdict: the largest shift on X against eps M, densities as telemetry."""
    window = sumset(T, difference_set(B0, B0))
    validator = HypothesisValidator("croot-sisask")
    validator.require("T + B0 - B0 growth", window.size / T.size, "<=", L)
    validator.require("S + B0 growth", sumset(S, B0).size / S.size, "<=", K)
    checks = validator.raise_if_failed()

    result = croot_sisask(f, S, T, B0, p, L, K, epsilon, book=book, seed=seed)
    return LemmaVerdict.conclude(
        "croot-sisask", checks, lhs=result.worst_shift, rhs=result.budget, relation="<=", book=book, seed=seed,
        t=result.t, density=result.density, density_bound=result.density_bound,
        density_meets_bound=result.density >= result.density_bound,
        sample_error=result.sample_error, sample_threshold=result.sample_threshold, samples=result.samples,
    )
