"""Random instance generators for every lemma engine and the suite runner behind `rado lemma`."""
import math
from collections.abc import Callable

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from src.applemmas.almost_periodic import croot_sisask_check
from src.applemmas.chang import chang_bound_check, dissociation_test, local_chang
from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.pipeline import iteration_parameters, iteration_step, prop_d_pipeline
from src.applemmas.sifting import sift_check
from src.applemmas.specpos import verify_specpos
from src.applemmas.verdicts import LemmaVerdict
from src.bohr.bohr_sets import build_bohr, clamp_width, growth_check, regular_pair_check, rigidity_check
from src.bohr.game import hereditary_density_check
from src.config import DEFAULT_SEED, INSTANCE_ATTEMPTS, REGULAR_GRID
from src.errors import BudgetExceeded, ConstantsMismatch, HypothesisFail, InputError
from src.harmonics.fourier import (
    autocorrelation,
    convolve_measures,
    difference_set,
    fourfold_measure,
    inner,
    large_spectrum,
    relative_coefficient,
    sumset,
)
from src.harmonics.groups import DensityWeight, FiniteGroup, GroupSubset, dilate

type Generator = Callable[[np.random.Generator, FiniteGroup, ConstantBook, int], LemmaVerdict]


def interval(group: FiniteGroup, radius: int, c: int = 1) -> GroupSubset:
    """c.[-radius, radius] as the Bohr set B({c^-1}, 2 sin(pi radius / p))."""
    p = group.q
    frequency = group.inverse(c)
    return build_bohr(group, [frequency], clamp_width(2 * math.sin(math.pi * radius / p))).members


def residue_window(group: FiniteGroup, radius: int, modulus: int, residues, c: int = 1) -> GroupSubset:
    """c.{x in [-radius, radius] : x mod modulus in residues}, read on integer representatives."""
    xs = [x for x in range(-radius, radius + 1) if x % modulus in residues]
    return dilate(GroupSubset.from_members(group, [x % group.q for x in xs]), c)


def _unit(rng: np.random.Generator, group: FiniteGroup) -> int:
    return int(rng.integers(1, group.q))


def _random_subset(rng: np.random.Generator, base: GroupSubset, density: float) -> GroupSubset:
    mask = base.mask & (rng.random(base.group.order) < density)
    return GroupSubset(group=base.group, mask=mask)


def growth_instance(rng, group, book, seed) -> LemmaVerdict:
    d = int(rng.integers(1, 3))
    frequencies = [int(u) for u in rng.integers(1, group.q, size=d)]
    width = float(rng.uniform(0.05, 1.0))
    verdict = growth_check(group, frequencies, width, book)
    return verdict.model_copy(update={"seed": seed})


def regular_instance(rng, group, book, seed) -> LemmaVerdict:
    d = int(rng.integers(1, 3))
    frequencies = [int(u) for u in rng.integers(1, group.q, size=d)]
    verdict = regular_pair_check(
        group, frequencies, float(rng.uniform(0.2, 1.0)), int(rng.integers(1, 3)), float(rng.uniform(0.2, 1.0)),
        REGULAR_GRID, book,
    )
    return verdict.model_copy(update={"seed": seed})


def rigidity_instance(rng, group, book, seed) -> LemmaVerdict:
    c = _unit(rng, group)
    B0 = interval(group, int(rng.integers(group.q // 8, group.q // 3)), c)
    B1 = interval(group, int(rng.integers(1, 4)), c)
    eta = sumset(B1, B0).size / B0.size - 1
    gamma = group.inverse(c) * int(rng.integers(1, 4)) % group.q
    kappa = abs(relative_coefficient(B0, B0, gamma))
    if kappa < 0.05 or eta > 1:
        raise HypothesisFail("drawn character has a negligible coefficient")
    return rigidity_check(B0, B1, gamma, eta, kappa, book).model_copy(update={"seed": seed})


def hereditary_instance(rng, group, book, seed) -> LemmaVerdict:
    c = _unit(rng, group)
    B0 = interval(group, int(rng.integers(group.q // 8, group.q // 3)), c)
    B1 = interval(group, int(rng.integers(1, 3)), c)
    A = _random_subset(rng, GroupSubset.full(group), float(rng.uniform(0.2, 0.6)))
    eta = sumset(B0, B1).size / B0.size - 1
    if eta > 1:
        raise HypothesisFail("B1 grows B0 too much")
    return hereditary_density_check(A, B0, B1, eta, book).model_copy(update={"seed": seed})


def specpos_instance(rng, group, book, seed) -> LemmaVerdict:
    c = _unit(rng, group)
    radius = int(rng.integers(group.q // 4, group.q // 2 - 4))
    small = int(rng.integers(1, 3))
    B0 = interval(group, radius, c)
    B1 = interval(group, small, c)
    modulus = int(rng.integers(2, 4))
    A = residue_window(group, radius, modulus, {0}, c) if rng.random() < 0.7 else _random_subset(rng, B0, 0.5)
    mu1 = DensityWeight.uniform_on(B1)
    mu = convolve_measures(mu1, mu1.reflect())
    D = mu.support() & residue_window(group, 2 * small, modulus, set(range(1, modulus)), c)

    inside = A & B0
    scale = (inside.size / B0.size) ** 2 * B0.density
    delta = mu.mass(D)
    if delta * scale <= 0:
        raise HypothesisFail("degenerate draw")
    deviation = abs(inner(autocorrelation(inside), D.indicator, mu) - delta * scale)
    epsilon = min(1.0, deviation / (delta * scale))
    eta = max(sumset(B1, B0).size / B0.size - 1, 1e-9)
    if epsilon <= 0 or eta > 1:
        raise HypothesisFail("no deviation on the drawn instance")
    k = int(rng.integers(1, 5))
    return verify_specpos(A, B0, B1, mu, D, k, epsilon, eta, book, seed=seed)


def _planted_chain(rng: np.random.Generator, group: FiniteGroup, many: bool):
    """
    B0 = G and A = c.(evens in a wide window), with B1 = B2 = c.[-1, 1] and B3 = B4 = B5 = {0}.

    D is c.(odd numbers in [-4, 4]), which A - A avoids near 0, or the even
    numbers there when many is set.
    """
    c = _unit(rng, group)
    radius = int(rng.integers(group.q // 4, group.q // 2 - 5))
    A = residue_window(group, radius, 2, {0}, c)
    small = interval(group, 1, c)
    zero = GroupSubset.from_members(group, [0])
    D = residue_window(group, 4, 2, {0} if many else {1}, c)
    return A, D, [GroupSubset.full(group), small, small, zero, zero, zero]


def absorbing_interval(group: FiniteGroup, spread: int, eta: float, c: int = 1) -> GroupSubset:
    """The narrowest c.[-R, R] with |c.[-R - spread, R + spread]| <= (1 + eta) |c.[-R, R]|, else G."""
    radius = max(0, math.ceil((2 * spread / eta - 1) / 2))
    if 2 * (radius + spread) + 1 >= group.q:
        return GroupSubset.full(group)
    return interval(group, radius, c)


def sift_instance(rng, group, book, seed) -> LemmaVerdict:
    """A random subset of density 0.1 to 0.3 in a B0 that absorbs B1 + B2 for short intervals B1, B2."""
    c = _unit(rng, group)
    r1, r2 = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    B1 = interval(group, r1, c)
    B2 = interval(group, r2, c)
    epsilon = float(rng.choice([0.25, 0.5]))
    target = float(rng.uniform(0.1, 0.3))
    # 0.8 leaves room for the measured density to fall below the target
    B0 = absorbing_interval(group, r1 + r2, epsilon * (0.8 * target) ** 2 / 4, c)
    A = _random_subset(rng, B0, target)
    if A.is_empty():
        raise HypothesisFail("empty draw")
    kappa = 1 / 32
    k = max(1, math.ceil(book.C_rdc / epsilon * math.log(2 / kappa)))
    return sift_check(A, B0, B1, B2, k, epsilon, kappa, book=book, seed=seed)


def chang_instance(rng, group, book, seed) -> LemmaVerdict:
    c = _unit(rng, group)
    B0 = interval(group, int(rng.integers(group.q // 4, group.q // 2 - 1)), c)
    A = _random_subset(rng, B0, float(rng.uniform(0.3, 0.7)))
    epsilon = 0.5
    alpha = (A & B0).size / B0.size
    if alpha <= 0:
        raise HypothesisFail("empty draw")
    k = max(1, math.ceil(book.C_llc / epsilon**2 * math.log(2 / alpha)))
    radius = int(rng.integers(0, 2))
    B1 = interval(group, radius, c)
    B2 = interval(group, int(rng.integers(0, 2)), c)
    delta = float(rng.uniform(0.01, 0.2))
    return local_chang(A, B0, B1, B2, epsilon, delta, k, book=book, seed=seed).verdict


def chang_bound_instance(rng, group, book, seed) -> LemmaVerdict:
    c = _unit(rng, group)
    B0 = interval(group, int(rng.integers(group.q // 4, group.q // 2 - 1)), c)
    A = _random_subset(rng, B0, float(rng.uniform(0.25, 0.5)))
    mu = DensityWeight.uniform_on(B0)
    epsilon = 0.5
    chosen: list[int] = []
    for u in large_spectrum(A & B0, B0, epsilon):
        if dissociation_test(group, chosen + [u], mu, 1.0, seed=seed).dissociated:
            chosen.append(u)
    return chang_bound_check(A, mu, chosen, epsilon, book, seed=seed)


def croot_sisask_instance(rng, group, book, seed) -> LemmaVerdict:
    c = _unit(rng, group)
    top = max(3, group.q // 8)
    S = _random_subset(rng, interval(group, int(rng.integers(2, top)), c), float(rng.uniform(0.3, 0.8)))
    T = interval(group, int(rng.integers(2, top)), c)
    B0 = interval(group, int(rng.integers(1, max(2, group.q // 16) + 1)), c)
    if S.is_empty():
        raise HypothesisFail("empty draw")
    f = _random_subset(rng, GroupSubset.full(group), 0.5).indicator
    L = max(2.0, sumset(T, difference_set(B0, B0)).size / T.size)
    K = max(2.0, sumset(S, B0).size / S.size)
    epsilon = float(rng.uniform(0.25, 1.0))
    return croot_sisask_check(f, S, T, B0, 2.0, L, K, epsilon, book, seed=seed)


def prop_d_instance(rng, group, book, seed) -> LemmaVerdict:
    """
    S = B0 = B3 = G, B1 and B2 intervals c.[-r, r] covering about half of G, B4 = c.[-r4, r4] with r4 <= 3.

    B2 - B2 is all of G, so every growth hypothesis holds at ratio at most 2,
    and r stays below 0.28 p so the characters +-c^-1 keep a coefficient
    above 1/2 on B2. Local Chang then has a nonzero frequency to pick and
    B5 n (B4 - B4) is an interval around 0 rather than {0}.
    """
    p = group.q
    c = _unit(rng, group)
    full = GroupSubset.full(group)
    half = math.ceil((p - 2) / 4)
    B1 = interval(group, int(rng.integers(half, (p - 1) // 2 + 1)), c)
    B2 = interval(group, int(rng.integers(half, max(half + 1, int(0.28 * p)))), c)
    B4 = interval(group, int(rng.integers(1, 4)), c)
    T = _random_subset(rng, B1, float(rng.uniform(0.3, 0.8)))
    D = _random_subset(rng, full, float(rng.uniform(0.15, 0.5)))
    if T.is_empty() or D.is_empty():
        raise HypothesisFail("empty draw")
    epsilon = 1 / 32
    sigma = 1.0
    tau = T.size / B1.size
    l = max(1, math.ceil(book.C_L * math.log(2 / (sigma * epsilon))))
    m = max(
        1,
        math.ceil(book.C_pd / epsilon**2 * l**2 * math.log(2 / tau) * math.log(2 / sigma)),
        # local Chang runs with eps = 1/2 on a set of relative density 1
        math.ceil(book.C_llc * 4 * math.log(2)),
    )
    return prop_d_pipeline(full, T, D, full, B1, B2, full, B4, epsilon, sigma, tau, l, m, book, seed).verdict


def iteration_instance(rng, group, book, seed) -> LemmaVerdict:
    A, D, chain = _planted_chain(rng, group, many=bool(rng.random() < 0.3))
    alpha = (A & chain[0]).size / chain[0].size
    delta = fourfold_measure(chain[1], chain[2]).mass(D)
    params = iteration_parameters(alpha, delta, book)
    return iteration_step(A, D, chain, params.k, params.l, params.m, delta, book, seed).verdict


GENERATORS: dict[str, Generator] = {
    "growth": growth_instance,
    "regular": regular_instance,
    "rigidity": rigidity_instance,
    "hereditary": hereditary_instance,
    "specpos": specpos_instance,
    "sift": sift_instance,
    "chang": chang_instance,
    "changbound": chang_bound_instance,
    "cs": croot_sisask_instance,
    "propd": prop_d_instance,
    "itstep": iteration_instance,
}


class SuiteReport(BaseModel):
    """Outcome of a generated suite: verdicts, draw statistics and engine failures."""

    lemma: str
    group: str
    requested: int
    attempts: int = 0
    verdicts: list[LemmaVerdict] = Field(default_factory=list)
    mismatches: list[str] = Field(default_factory=list)

    @property
    def produced(self) -> int:
        return len(self.verdicts)

    @property
    def passed(self) -> int:
        return sum(v.passed for v in self.verdicts)

    @property
    def success_rate(self) -> float:
        """Share of draws that conformed to the engine's hypotheses."""
        return self.produced / self.attempts if self.attempts else 0.0

    @property
    def all_passed(self) -> bool:
        return self.produced == self.requested and self.passed == self.produced and not self.mismatches

    def summary(self) -> dict:
        return {
            "lemma": self.lemma,
            "group": self.group,
            "requested": self.requested,
            "produced": self.produced,
            "passed": self.passed,
            "attempts": self.attempts,
            "success_rate": self.success_rate,
            "mismatches": len(self.mismatches),
        }


def run_suite(
    lemma: str,
    p: int,
    instances: int,
    seed: int = DEFAULT_SEED,
    book: ConstantBook = DEFAULT_BOOK,
) -> SuiteReport:
    """
    Generate and check instances of one engine in Z/pZ.

    Draws whose measured hypotheses fail are discarded and redrawn, up to
    INSTANCE_ATTEMPTS per requested instance; ConstantsMismatch is recorded
    against the suite. Each instance seed is derived from the suite seed.

    Raises:
        InputError: for an unknown lemma or a bad instance count
    """
    if lemma not in GENERATORS:
        raise InputError(f"unknown lemma {lemma!r}; choose from {', '.join(sorted(GENERATORS))}")
    if instances < 1:
        raise InputError(f"instance count must be positive, got {instances}")
    group = FiniteGroup.cyclic(p)
    generator = GENERATORS[lemma]
    rng = np.random.default_rng(seed)
    report = SuiteReport(lemma=lemma, group=group.label, requested=instances)

    while report.produced < instances and report.attempts < instances * INSTANCE_ATTEMPTS:
        report.attempts += 1
        instance_seed = int(rng.integers(0, 2**31))
        try:
            verdict = generator(np.random.default_rng(instance_seed), group, book, instance_seed)
        except (HypothesisFail, BudgetExceeded) as e:
            logger.debug(f"{lemma}: draw {report.attempts} does not conform: {e}")
            continue
        except ConstantsMismatch as e:
            logger.warning(f"{lemma}: draw {report.attempts} hit a constants mismatch: {e}")
            report.mismatches.append(str(e))
            continue
        report.verdicts.append(verdict)

    logger.info(
        f"{lemma}: {report.passed}/{report.produced} verdicts passed from {report.attempts} draws "
        f"(requested {instances})"
    )
    return report
