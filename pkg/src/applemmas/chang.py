"""Local Chang: a greedy dissociated subset of the large spectrum controls every large coefficient."""
import itertools
import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.verdicts import LemmaVerdict
from src.bohr.bohr_sets import BohrSet, build_bohr
from src.config import ASCENT_ITERATIONS, COMPLEX_TOL, DEFAULT_SEED, DISSOCIATION_EXACT_LIMIT
from src.errors import ConstantsMismatch, InputError
from src.harmonics.fourier import (
    convolve_measures,
    difference_set,
    fourier_stieltjes,
    iterated_sumset,
    large_spectrum,
    measure_power,
    sumset,
)
from src.harmonics.groups import DensityWeight, FiniteGroup, GroupSubset
from src.validation.validator import HypothesisValidator

ASCENT_RESTARTS = 2


def riesz_product(group: FiniteGroup, frequencies, omega) -> np.ndarray:
    """p_omega(x) = prod over lambda of (1 + Re(omega(lambda) lambda(x)))."""
    frequencies = list(frequencies)
    omega = np.asarray(omega, dtype=np.complex128)
    if omega.shape != (len(frequencies),):
        raise InputError("omega must give one value per frequency")
    if np.any(np.abs(omega) > 1 + COMPLEX_TOL):
        raise InputError("omega values must lie in the closed unit disc")
    product = np.ones(group.order)
    for u, w in zip(frequencies, omega):
        product *= 1 + (w * group.character_values(u)).real
    return product


def _ascent(group: FiniteGroup, frequencies: list[int], mu: DensityWeight, rng: np.random.Generator,
            iterations: int = ASCENT_ITERATIONS) -> tuple[float, np.ndarray]:
    """
    Coordinate ascent for sup over omega of the integral of p_omega against mu.

    With the other coordinates fixed the integral is c0 + Re(w c), maximised
    at w = conj(c) / |c|. The returned value is attained, so it is a
    certified lower bound for the supremum.
    """
    n = len(frequencies)
    if n == 0:
        return 1.0, np.zeros(0, dtype=np.complex128)
    characters = np.stack([group.character_values(u) for u in frequencies])
    weights = mu.weights

    starts = [np.zeros(n, dtype=np.complex128), np.ones(n, dtype=np.complex128)]
    for _ in range(ASCENT_RESTARTS):
        starts.append(np.exp(2j * np.pi * rng.random(n)))

    best_value, best_omega = -math.inf, starts[0]
    for omega in starts:
        omega = omega.copy()
        factors = 1 + (omega[:, None] * characters).real
        for _ in range(iterations):
            for i in range(n):
                others = np.prod(np.delete(factors, i, axis=0), axis=0) * weights
                c = complex((others * characters[i]).sum())
                omega[i] = np.conj(c) / abs(c) if abs(c) > 0 else 0.0
                factors[i] = 1 + (omega[i] * characters[i]).real
        value = float((np.prod(factors, axis=0) * weights).sum())
        if value > best_value:
            best_value, best_omega = value, omega
    return best_value, best_omega


class DissociationReport(BaseModel):
    frequencies: list[int]
    classical: bool | None = None
    riesz_lower_bound: float
    threshold: float
    dissociated: bool
    omega: list[tuple[float, float]] = Field(default_factory=list)


def is_classically_dissociated(group: FiniteGroup, frequencies) -> bool:
    """
    True iff no nonzero sigma in {-1, 0, 1}^Lambda has sum sigma_i lambda_i = 0.

    Meet in the middle: the signed sums of each half are tabulated and a
    relation exists iff more than the all-zero pair cancels.

    Raises:
        InputError: if Lambda has more than DISSOCIATION_EXACT_LIMIT elements
    """
    frequencies = list(frequencies)
    if len(frequencies) > DISSOCIATION_EXACT_LIMIT:
        raise InputError(
            f"exact dissociation test supports at most {DISSOCIATION_EXACT_LIMIT} frequencies, "
            f"got {len(frequencies)}"
        )
    if not frequencies:
        return True

    def signed_sums(part: list[int]) -> dict[int, int]:
        if not part:
            return {0: 1}
        signs = np.array(list(itertools.product((-1, 0, 1), repeat=len(part))))
        vectors = signs @ group.coords[part]
        indices, counts = np.unique(group.index_of(vectors), return_counts=True)
        return dict(zip(indices.tolist(), counts.tolist()))

    half = len(frequencies) // 2
    left = signed_sums(frequencies[:half])
    right = signed_sums(frequencies[half:])
    cancelling = sum(count * right.get(group.neg(index), 0) for index, count in left.items())
    return cancelling == 1


def dissociation_test(
    group: FiniteGroup,
    frequencies,
    mu: DensityWeight,
    K: float,
    seed: int = DEFAULT_SEED,
    iterations: int = ASCENT_ITERATIONS,
) -> DissociationReport:
    """
    Classical dissociativity plus a certified lower bound for sup over omega of the integral of p_omega dmu.

    A lower bound above exp(K) certifies that Lambda is not K-dissociated
    with respect to mu; otherwise Lambda is reported as dissociated on the
    strength of the ascent.
    """
    frequencies = list(frequencies)
    classical = (
        is_classically_dissociated(group, frequencies) if len(frequencies) <= DISSOCIATION_EXACT_LIMIT else None
    )
    value, omega = _ascent(group, frequencies, mu, np.random.default_rng(seed), iterations)
    threshold = math.exp(K)
    return DissociationReport(
        frequencies=frequencies,
        classical=classical,
        riesz_lower_bound=value,
        threshold=threshold,
        dissociated=value <= threshold,
        omega=[(float(w.real), float(w.imag)) for w in omega],
    )


class ChangResult(BaseModel):
    """The Bohr set B3 = B(Lambda, delta) with the spectrum it controls."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bohr: BohrSet = Field(exclude=True)
    frequencies: list[int]
    spectrum: list[int]
    rejected: int
    verdict: LemmaVerdict

    def to_json(self) -> dict:
        return {**self.model_dump(), "bohr": self.bohr.to_json()}


def chang_measure(B0: GroupSubset, B1: GroupSubset, k: int) -> DensityWeight:
    """mu_{B0 + kB1} * mu_{-B1}^{*k}."""
    spread = sumset(B0, iterated_sumset(B1, k))
    return convolve_measures(DensityWeight.uniform_on(spread), measure_power(DensityWeight.uniform_on(B1.negate()), k))


def local_chang(
    A: GroupSubset,
    B0: GroupSubset,
    B1: GroupSubset,
    B2: GroupSubset,
    epsilon: float,
    delta: float,
    k: int,
    eta: float | None = None,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
) -> ChangResult:
    """
    Build B3 = B(Lambda, delta) with |Lambda| <= k such that every gamma in the large spectrum
    of A relative to B0 has |1 - gamma(x)| <= C12 eta + k delta on (B2 - B2) n B3.

    Lambda grows greedily: a candidate joins Lambda_j when the ascent cannot
    certify that Lambda_j + {gamma} fails to be (j+1)/(k+1)-dissociated with
    respect to mu_{B0 + kB1} * mu_{-B1}^{*k}. When eta is omitted it is the
    measured growth mu(B2 + B1)/mu(B1) - 1.

    Raises:
        InputError: for out-of-range parameters
        HypothesisFail: when a measured hypothesis does not hold
        ConstantsMismatch: when the greedy set would exceed k elements
    """
    if k < 1:
        raise InputError(f"k must be a positive integer, got {k}")
    if not 0 < epsilon <= 1 or not 0 < delta <= 2:
        raise InputError(f"epsilon must lie in (0, 1] and delta in (0, 2], got {epsilon}, {delta}")
    if B0.is_empty() or B1.is_empty() or B2.is_empty():
        raise InputError("B0, B1, B2 must be nonempty")

    group = A.group
    inside = A & B0
    alpha = inside.size / B0.size
    growth = sumset(B2, B1).size / B1.size
    if eta is None:
        eta = growth - 1

    validator = HypothesisValidator("chang")
    validator.require("alpha", alpha, ">=", COMPLEX_TOL)
    validator.require("eta", eta, "<=", 1.0)
    if alpha > 0:
        validator.require("k", k, ">=", book.C_llc / epsilon**2 * math.log(2 / alpha))
    validator.require("B0 + kB1 growth", sumset(B0, iterated_sumset(B1, k)).size / B0.size, "<=", 2.0)
    validator.require("B2 + B1 growth", growth, "<=", 1 + eta)
    checks = validator.raise_if_failed()

    spectrum = large_spectrum(inside, B0, epsilon)
    coefficients = np.abs(fourier_stieltjes(DensityWeight(group=group, weights=inside.indicator / inside.size)))
    ordered = sorted(spectrum, key=lambda u: (-coefficients[u], u))
    mu = chang_measure(B0, B1, k)
    mu_spectrum = np.abs(fourier_stieltjes(mu))
    rng = np.random.default_rng(seed)

    chosen: list[int] = []
    rejected = 0
    while True:
        j = len(chosen)
        threshold = math.exp((j + 1) / (k + 1))
        added = None
        for gamma in ordered:
            if gamma in chosen:
                continue
            # omega supported on gamma alone already gives 1 + |mu^(gamma)|
            if 1 + mu_spectrum[gamma] > threshold + COMPLEX_TOL:
                continue
            value, _ = _ascent(group, chosen + [gamma], mu, rng)
            if value <= threshold:
                added = gamma
                break
        if added is None:
            rejected = len(ordered) - len(chosen)
            break
        chosen.append(added)
        logger.debug(f"chang: Lambda_{j + 1} adds frequency {added}")
        if len(chosen) > k:
            raise ConstantsMismatch(
                f"greedy dissociated set exceeded k = {k} frequencies", k=k, frequencies=chosen,
            )

    B3 = build_bohr(group, chosen, delta)
    window = difference_set(B2, B2) & B3.members
    deviation = 0.0
    for gamma in spectrum:
        values = group.character_values(gamma)[window.mask]
        deviation = max(deviation, float(np.max(np.abs(1 - values), initial=0.0)))

    verdict = LemmaVerdict.conclude(
        "chang", checks, lhs=deviation, rhs=book.C12 * eta + k * delta, relation="<=", book=book, seed=seed,
        alpha=alpha, spectrum_size=len(spectrum), frequencies=list(B3.frequencies), eta=eta,
    )
    return ChangResult(bohr=B3, frequencies=chosen, spectrum=spectrum, rejected=rejected, verdict=verdict)


def chang_bound_check(
    A: GroupSubset,
    mu: DensityWeight,
    frequencies,
    epsilon: float,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int = DEFAULT_SEED,
) -> LemmaVerdict:
    """|Lambda| <= C_lcb eps^-2 log(2/alpha) for Lambda 1-dissociated inside the large spectrum of 1_A dmu."""
    if not 0 < epsilon <= 1:
        raise InputError(f"epsilon must lie in (0, 1], got {epsilon}")
    group = A.group
    frequencies = list(frequencies)
    alpha = mu.mass(A)
    if alpha > 0:
        transform = fourier_stieltjes(DensityWeight(group=group, weights=mu.weights * A.indicator / alpha))
    else:
        transform = np.zeros(group.order)
    report = dissociation_test(group, frequencies, mu, 1.0, seed=seed)

    validator = HypothesisValidator("chang bound")
    validator.require("mu(A)", alpha, ">=", COMPLEX_TOL)
    for u in frequencies:
        validator.require(f"relative coefficient at {u}", abs(transform[u]), ">=", epsilon)
    validator.require("Riesz lower bound", report.riesz_lower_bound, "<=", report.threshold)
    checks = validator.raise_if_failed()

    return LemmaVerdict.conclude(
        "chang-bound", checks, lhs=len(frequencies), rhs=book.C_lcb / epsilon**2 * math.log(2 / alpha),
        relation="<=", book=book, seed=seed, classical=report.classical,
    )
