"""The correlation proposition and the iteration step built from the lemma engines."""
import math
from contextlib import contextmanager
from typing import Literal

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.applemmas.almost_periodic import AlmostPeriodSet, croot_sisask
from src.applemmas.chang import ChangResult, local_chang
from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.sifting import SiftOutput, pair_correlation, sift
from src.applemmas.specpos import verify_specpos
from src.applemmas.verdicts import LemmaVerdict
from src.bohr.bohr_sets import BohrSet, clamp_width
from src.bohr.game import GameValue, game_density
from src.config import COMPLEX_TOL, DEFAULT_SEED
from src.errors import ConstantsMismatch, InputError, RadoError
from src.harmonics.fourier import (
    autocorrelation,
    difference_set,
    fourfold_measure,
    inner,
    iterated_sumset,
    smooth,
    sumset,
    sup_norm,
)
from src.harmonics.groups import DensityWeight, GroupSubset
from src.validation.validator import HypothesisValidator

PIPELINE_EPSILON = 1 / 32
SPECPOS_EPSILON = 1 / 2
SIFT_EPSILON = 1 / 4
SIFT_KAPPA = 1 / 32


@contextmanager
def stage(name: str):
    """Prefix errors raised inside a sub-engine with the stage that raised them."""
    try:
        yield
    except RadoError as e:
        e.details.setdefault("stage", name)
        e.args = (f"{name}: {e.args[0]}",) + e.args[1:]
        raise


def _growth(lhs: GroupSubset, base: GroupSubset) -> float:
    return lhs.size / base.size


class PropDResult(BaseModel):
    """B5 = B(Lambda, c8 eps sigma / m) with the almost-period and Chang data behind it."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bohr: BohrSet = Field(exclude=True)
    almost_period: AlmostPeriodSet
    chang: ChangResult
    game: GameValue
    verdict: LemmaVerdict

    def to_json(self) -> dict:
        return {
            "bohr": self.bohr.to_json(),
            "almost_period": self.almost_period.to_json(),
            "chang": self.chang.to_json(),
            "game": self.game.model_dump(),
            "verdict": self.verdict.model_dump(),
        }


def prop_d_pipeline(
    S: GroupSubset,
    T: GroupSubset,
    D: GroupSubset,
    B0: GroupSubset,
    B1: GroupSubset,
    B2: GroupSubset,
    B3: GroupSubset,
    B4: GroupSubset,
    epsilon: float,
    sigma: float,
    tau: float,
    l: int,
    m: int,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
) -> PropDResult:
    """
    Find B5 of rank at most m and width c8 eps sigma / m such that every probability
    measure nu on B5 n (B4 - B4) has ||1_D * nu||_inf >= <1_D, mu_T * mu_S> - eps.

    Runs almost periodicity on 1_D * mu_{-S} over T' = B1 + (l-1)(B2 - B2),
    then local Chang on the translated almost-period set inside B2. The
    conclusion is checked exactly through the game value over B5 n (B4 - B4).

    Raises:
        InputError: for out-of-range parameters
        HypothesisFail: when a measured hypothesis of this or a called engine fails
        ConstantsMismatch: when a called engine cannot realise its conclusion
    """
    if not all(0 < x <= 1 for x in (epsilon, sigma, tau)):
        raise InputError(f"epsilon, sigma, tau must lie in (0, 1], got {epsilon}, {sigma}, {tau}")
    if l < 1 or m < 1:
        raise InputError(f"l and m must be positive integers, got {l}, {m}")
    if any(B.is_empty() for B in (B0, B1, B2, B3, B4)):
        raise InputError("B0..B4 must be nonempty")

    spread = iterated_sumset(difference_set(B2, B2), l)
    validator = HypothesisValidator("prop-d")
    validator.require("l", l, ">=", book.C_L * math.log(2 / (sigma * epsilon)))
    validator.require("m", m, ">=", book.C_pd / epsilon**2 * l**2 * math.log(2 / tau) * math.log(2 / sigma))
    validator.require("B0 - B1 + l(B2 - B2) growth", _growth(sumset(difference_set(B0, B1), spread), B0), "<=", 2)
    validator.require("B0 + B2 growth", _growth(sumset(B0, B2), B0), "<=", 2)
    validator.require("B1 + l(B2 - B2) growth", _growth(sumset(B1, spread), B1), "<=", 2)
    validator.require("B2 + mB3 growth", _growth(sumset(B2, iterated_sumset(B3, m)), B2), "<=", 2)
    validator.require("B4 + B3 growth", _growth(sumset(B4, B3), B3), "<=", 1 + book.c962 * epsilon * sigma)
    validator.require_true("-S inside B0", S.negate().issubset(B0))
    validator.require_true("T inside B1", T.issubset(B1))
    validator.require("density of -S in B0", S.size / B0.size, ">=", sigma)
    validator.require("density of T in B1", T.size / B1.size, ">=", tau)
    checks = validator.raise_if_failed()

    window = sumset(B1, iterated_sumset(difference_set(B2, B2), l - 1))
    p = max(2.0, 2 * math.log2(2 / tau))
    with stage("almost periodicity"):
        period = croot_sisask(
            D.indicator, S.negate(), window, B2, p=p, L=2.0, K=2 / sigma, epsilon=epsilon / (4 * l),
            book=book, seed=seed,
        )

    width = clamp_width(book.c8 * epsilon * sigma / m)
    with stage("local Chang"):
        chang = local_chang(
            period.X.translate(period.t), B2, B3, B4, epsilon=0.5, delta=width, k=m,
            eta=book.c962 * epsilon * sigma, book=book, seed=seed,
        )
    B5 = chang.bohr
    if not chang.verdict.passed:
        raise ConstantsMismatch("local Chang rigidity bound failed inside the pipeline", stage="local Chang")

    support = B5.members & difference_set(B4, B4)
    game = game_density(D, support)
    correlation = pair_correlation(T, S, D)
    uniform = sup_norm(smooth(D.indicator, DensityWeight.uniform_on(support)))
    logger.debug(f"prop-d: game {game.value:.6f} against correlation {correlation:.6f} - {epsilon}")
    verdict = LemmaVerdict.conclude(
        "propd", checks, lhs=game.value, rhs=correlation - epsilon, book=book, seed=seed,
        rank=B5.d, width=width, support=support.size, uniform_value=uniform, game_method=game.method,
        almost_period_density=period.density, translate=period.t,
    )
    return PropDResult(bohr=B5, almost_period=period, chang=chang, game=game, verdict=verdict)


class IterationParameters(BaseModel):
    k: int
    l: int
    m: int


def iteration_parameters(alpha: float, delta: float, book: ConstantBook = DEFAULT_BOOK) -> IterationParameters:
    """
    k, l, m meeting the iteration step's bounds and, directly, those of sifting and the pipeline.

    With the default book the two sets of bounds agree; a tuned book may
    loosen the step's own bounds, so the engines' bounds are enforced too.
    """
    if not 0 < alpha <= 1 or not 0 < delta <= 1:
        raise InputError(f"alpha and delta must lie in (0, 1], got {alpha}, {delta}")
    log_alpha = math.log(2 / alpha)
    k = max(
        math.ceil(book.C_spec * math.log(2 / delta)),
        math.ceil(book.C_rdc / SIFT_EPSILON * math.log(2 / SIFT_KAPPA)),
        1,
    )
    log_sigma = math.log(2) + 4 * k * math.log(1 / alpha)
    l = max(
        math.ceil(book.C_spec3 * k * log_alpha),
        math.ceil(book.C_L * (log_sigma + math.log(1 / PIPELINE_EPSILON))),
        1,
    )
    m = max(
        math.ceil(book.C_spec2 * l**2 * k**2 * log_alpha**2),
        math.ceil(book.C_pd / PIPELINE_EPSILON**2 * l**2 * log_sigma**2),
        1,
    )
    return IterationParameters(k=k, l=l, m=m)


class IterationOutcome(BaseModel):
    """Either many solutions (the correlation clears its threshold) or a hereditary density increment."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["many_solutions", "increment"]
    alpha: float
    correlation: float
    threshold: float
    bohr: BohrSet | None = Field(default=None, exclude=True)
    density: GameValue | None = None
    sift: SiftOutput | None = None
    verdicts: list[LemmaVerdict] = Field(default_factory=list)
    verdict: LemmaVerdict

    def to_json(self) -> dict:
        payload = self.model_dump(exclude={"sift"})
        payload["bohr"] = self.bohr.to_json() if self.bohr is not None else None
        payload["sift"] = self.sift.to_json() if self.sift is not None else None
        return payload


def iteration_step(
    A: GroupSubset,
    D: GroupSubset,
    bohr_chain: list[GroupSubset],
    k: int,
    l: int,
    m: int,
    delta: float,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
) -> IterationOutcome:
    """
    One step of the density-increment iteration on the chain B0, ..., B5.

    Either <1_A * 1_{-A}, 1_D>_{L_2(mu)} >= delta alpha^2 mu(B0) / 2 for the
    four-fold measure mu on B1 and B2, or there is a Bohr set B6 of rank at
    most m and width c128 alpha^{4k} / m with game density of A n B0 over
    B6 n (B5 - B5) at least (1 + c32) alpha. The second branch runs spectral
    positivity, sifting and the correlation proposition in turn.

    Raises:
        InputError: for a malformed chain or parameters
        HypothesisFail: when a measured hypothesis of the step or a called engine fails
        ConstantsMismatch: when a called engine cannot realise its conclusion
    """
    if len(bohr_chain) != 6:
        raise InputError(f"the iteration step needs six sets B0..B5, got {len(bohr_chain)}")
    if not 0 < delta <= 1:
        raise InputError(f"delta must lie in (0, 1], got {delta}")
    B0, B1, B2, B3, B4, B5 = bohr_chain
    if any(B.is_empty() for B in bohr_chain):
        raise InputError("B0..B5 must be nonempty")

    inside = A & B0
    alpha = inside.size / B0.size
    mu = fourfold_measure(B1, B2)
    validator = HypothesisValidator("itstep")
    validator.require("alpha", alpha, ">=", COMPLEX_TOL)
    validator.require("mu(D)", mu.mass(D), ">=", delta)
    if alpha > 0:
        validator.require("k", k, ">=", book.C_spec * math.log(2 / delta))
        validator.require("l", l, ">=", book.C_spec3 * k * math.log(2 / alpha))
        validator.require("m", m, ">=", book.C_spec2 * l**2 * k**2 * math.log(2 / alpha) ** 2)
    lB3 = iterated_sumset(difference_set(B3, B3), l)
    validator.require(
        "-B1 - B2 + B0 growth", _growth(sumset(sumset(B1, B2).negate(), B0), B0), "<=", 1 + book.c_me * alpha
    )
    validator.require("B2 + B1 + B0 growth", _growth(sumset(sumset(B2, B1), B0), B0), "<=", 1 + book.c16 * alpha**2)
    validator.require("B1 - B2 + l(B3 - B3) growth", _growth(sumset(difference_set(B1, B2), lB3), B1), "<=", 2)
    validator.require("B1 + B3 growth", _growth(sumset(B1, B3), B1), "<=", 2)
    validator.require("B2 + l(B3 - B3) growth", _growth(sumset(B2, lB3), B2), "<=", 2)
    validator.require("B3 + mB4 growth", _growth(sumset(B3, iterated_sumset(B4, m)), B3), "<=", 2)
    sigma = alpha ** (4 * k)
    validator.require(
        "B5 + B4 growth", _growth(sumset(B5, B4), B4), "<=", 1 + book.c96 * sigma
    )
    checks = validator.raise_if_failed()

    correlation = inner(autocorrelation(A), D.indicator, mu)
    threshold = 0.5 * delta * alpha**2 * B0.density
    if correlation >= threshold:
        logger.debug(f"itstep: correlation {correlation:.6g} clears {threshold:.6g}")
        verdict = LemmaVerdict.conclude(
            "itstep", checks, lhs=correlation, rhs=threshold, book=book, seed=seed, branch="many_solutions",
        )
        return IterationOutcome(
            kind="many_solutions", alpha=alpha, correlation=correlation, threshold=threshold, verdict=verdict,
        )

    if sigma == 0.0:
        raise ConstantsMismatch(f"alpha^(4k) underflows for alpha={alpha}, k={k}", alpha=alpha, k=k)

    with stage("spectral positivity"):
        positivity = verify_specpos(
            A, B0, sumset(B1, B2).negate(), mu, D, k, epsilon=SPECPOS_EPSILON,
            eta=book.c_me * alpha, book=book, seed=seed,
        )
    if not positivity.passed:
        raise ConstantsMismatch("spectral positivity bound failed inside the iteration step", stage="specpos")

    with stage("sifting"):
        pieces = sift(A, B0, B1, B2, k, alpha, SIFT_EPSILON, SIFT_KAPPA, book=book, seed=seed)

    with stage("correlation proposition"):
        prop = prop_d_pipeline(
            pieces.S, pieces.T, pieces.D,
            B1.translate(pieces.w), B2.translate(pieces.z), B3, B4, B5,
            epsilon=PIPELINE_EPSILON, sigma=sigma, tau=sigma, l=l, m=m, book=book, seed=seed,
        )
    if not prop.verdict.passed:
        raise ConstantsMismatch("correlation proposition failed inside the iteration step", stage="prop-d")

    B6 = prop.bohr
    support = B6.members & difference_set(B5, B5)
    density = game_density(inside, support)
    target = (1 + book.c32) * alpha
    if density.value < target - COMPLEX_TOL:
        raise ConstantsMismatch(
            f"increment density {density.value:.6g} falls short of {target:.6g}",
            stage="increment", density=density.value,
        )
    logger.info(f"itstep: increment to density {density.value:.6g} on a rank-{B6.d} Bohr set")
    verdict = LemmaVerdict.conclude(
        "itstep", checks, lhs=density.value, rhs=target, book=book, seed=seed, branch="increment",
        rank=B6.d, support=support.size, correlation=correlation, threshold=threshold,
        width=B6.width, log_width=math.log(book.c128) + 4 * k * math.log(alpha) - math.log(m),
    )
    return IterationOutcome(
        kind="increment", alpha=alpha, correlation=correlation, threshold=threshold, bohr=B6,
        density=density, sift=pieces, verdicts=[positivity, prop.verdict], verdict=verdict,
    )
