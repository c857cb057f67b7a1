"""Fourier analysis, convolution and measure algebra on finite groups.

Normalisations follow the usual additive-combinatorics conventions:

- f^(gamma) = E_x f(x) conj(gamma(x)), i.e. the sum divided by |G|
- f * g(x) = E_y f(x - y) g(y)
- for a measure mu, mu^(gamma) = sum_x mu(x) conj(gamma(x)) and
  f * mu(x) = sum_y f(x - y) mu(y)
"""
import numpy as np
from loguru import logger

from src.config import COMPLEX_TOL, ROUNDING_SLACK, SPECTRUM_TOL
from src.errors import ContractError, InputError
from src.harmonics.groups import DensityWeight, FiniteGroup, GroupSubset, dilate

# Weights below this are FFT round-off and are dropped from convolved measures.
SUPPORT_FLOOR = 1e-13


def _fft(f: np.ndarray, group: FiniteGroup) -> np.ndarray:
    return np.fft.fftn(np.asarray(f).reshape(group.shape)).ravel()


def _ifft(f: np.ndarray, group: FiniteGroup) -> np.ndarray:
    return np.fft.ifftn(np.asarray(f).reshape(group.shape)).ravel()


def dft(f: np.ndarray, group: FiniteGroup) -> np.ndarray:
    """Fourier coefficients indexed by frequency, divided by |G|."""
    return _fft(f, group) / group.order


def idft(spectrum: np.ndarray, group: FiniteGroup) -> np.ndarray:
    """Inverse of dft: f(x) = sum_gamma f^(gamma) gamma(x)."""
    return _ifft(spectrum, group) * group.order


def convolve(f: np.ndarray, g: np.ndarray, group: FiniteGroup) -> np.ndarray:
    """Normalised convolution f * g(x) = E_y f(x - y) g(y)."""
    out = _ifft(_fft(f, group) * _fft(g, group), group) / group.order
    if np.isrealobj(f) and np.isrealobj(g):
        return out.real
    return out


def _direct_counts(f: np.ndarray, g: np.ndarray, group: FiniteGroup) -> np.ndarray:
    out = np.zeros(group.order, dtype=np.int64)
    for y in np.flatnonzero(g):
        out += f[group.translate_index(group.neg(int(y)))] * g[y]
    return out


def integer_convolve(f: np.ndarray, g: np.ndarray, group: FiniteGroup) -> np.ndarray:
    """
    Exact sum_y f(x - y) g(y) for integer-valued f and g.

    The FFT result is accepted only if every entry lies within ROUNDING_SLACK
    of an integer; otherwise the direct sum is used.
    """
    f = np.asarray(f, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    raw = _ifft(_fft(f, group) * _fft(g, group), group).real
    rounded = np.rint(raw)
    if np.max(np.abs(raw - rounded), initial=0.0) <= ROUNDING_SLACK:
        return rounded.astype(np.int64)
    logger.warning("FFT counts failed the rounding check; falling back to direct summation")
    return _direct_counts(f, g, group)


def count_triples(A: GroupSubset, a: int, b: int) -> int:
    """
    Number of (x, y, z) in A^3 with a x - a y = b z.

    Equals |G|^2 <1_{a.A} * 1_{-a.A}, 1_{b.A}>, computed as exact integer
    pair counts summed over b.A.
    """
    group = A.group
    aA = dilate(A, a)
    bA = dilate(A, b)
    pairs = integer_convolve(aA.mask, aA.negate().mask, group)
    return int(pairs[bA.mask].sum())


def enumerate_triples(A: GroupSubset, a: int, b: int) -> int:
    """O(|A|^2) oracle for count_triples: z = b^{-1} a (x - y) must land in A."""
    group = A.group
    a = group.unit(a)
    factor = (group.inverse(b) * a) % group.q
    members = A.members()
    count = 0
    for x in members:
        for y in members:
            z = group.scale(factor, group.add(x, group.neg(y)))
            if A.mask[z]:
                count += 1
    return count


def large_spectrum(A: GroupSubset, base: GroupSubset, epsilon: float) -> list[int]:
    """
    Frequencies gamma with |(1_A dmu_base)^(gamma)| >= epsilon mu_base(A).

    Boundary ties are included up to SPECTRUM_TOL.
    """
    if base.is_empty():
        raise InputError("large spectrum relative to an empty base")
    if not 0 < epsilon <= 1:
        raise InputError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not A.issubset(base):
        raise InputError("large spectrum expects A to be a subset of the base")
    coefficients = np.abs(_fft(A.indicator, A.group)) / base.size
    threshold = epsilon * A.size / base.size - SPECTRUM_TOL
    return [int(u) for u in np.flatnonzero(coefficients >= threshold)]


def relative_coefficient(A: GroupSubset, base: GroupSubset, u: int) -> complex:
    """(1_A dmu_base)^(gamma_u) by direct evaluation."""
    values = A.group.character_values(u)
    return complex(np.conj(values[A.mask]).sum() / base.size)


def fourier_stieltjes(mu: DensityWeight) -> np.ndarray:
    """mu^(gamma) = sum_x mu(x) conj(gamma(x)) for every frequency."""
    return _fft(mu.weights, mu.group)


def is_positive_definite(mu: DensityWeight, tol: float = COMPLEX_TOL) -> bool:
    """True iff every mu^(gamma) is real and nonnegative within tol."""
    spectrum = fourier_stieltjes(mu)
    return bool(np.all(spectrum.real >= -tol) and np.all(np.abs(spectrum.imag) <= tol))


def _clean_weights(weights: np.ndarray) -> np.ndarray:
    weights = np.where(weights < SUPPORT_FLOOR, 0.0, weights)
    return weights / weights.sum()


def convolve_measures(mu: DensityWeight, nu: DensityWeight) -> DensityWeight:
    """(mu * nu)(x) = sum_y mu(x - y) nu(y)."""
    if mu.group != nu.group:
        raise InputError("measures live on different groups")
    group = mu.group
    raw = _ifft(_fft(mu.weights, group) * _fft(nu.weights, group), group).real
    return DensityWeight(group=group, weights=_clean_weights(raw))


def convolve_all(*measures: DensityWeight) -> DensityWeight:
    result = measures[0]
    for mu in measures[1:]:
        result = convolve_measures(result, mu)
    return result


def smooth(f: np.ndarray, mu: DensityWeight) -> np.ndarray:
    """f * mu(x) = sum_y f(x - y) mu(y)."""
    group = mu.group
    out = _ifft(_fft(f, group) * _fft(mu.weights, group), group)
    return out.real if np.isrealobj(f) else out


def autocorrelation(A: GroupSubset) -> np.ndarray:
    """1_A * 1_{-A}(x) = |{u in A : x + u in A}| / |G|."""
    counts = integer_convolve(A.mask, A.negate().mask, A.group)
    return counts / A.group.order


def sup_norm(f: np.ndarray) -> float:
    return float(np.max(np.abs(f), initial=0.0))


def lp_norm(f: np.ndarray, mu: DensityWeight, p: float) -> float:
    """||f||_{L_p(mu)} by direct summation, rescaled by the peak so large p does not underflow."""
    values = np.abs(np.asarray(f))[mu.weights > 0]
    peak = float(values.max(initial=0.0))
    if peak == 0.0:
        return 0.0
    weights = mu.weights[mu.weights > 0]
    return peak * float(((values / peak) ** p * weights).sum() ** (1.0 / p))


def inner(f: np.ndarray, g: np.ndarray, mu: DensityWeight) -> complex | float:
    """<f, g>_{L_2(mu)} = sum_x f(x) conj(g(x)) mu(x)."""
    value = (np.asarray(f) * np.conj(g) * mu.weights).sum()
    return float(value.real) if np.isrealobj(f) and np.isrealobj(g) else complex(value)


def sumset(A: GroupSubset, B: GroupSubset) -> GroupSubset:
    """A + B."""
    if A.is_empty() or B.is_empty():
        return GroupSubset.empty(A.group)
    counts = integer_convolve(A.mask, B.mask, A.group)
    return GroupSubset(group=A.group, mask=counts > 0)


def difference_set(A: GroupSubset, B: GroupSubset) -> GroupSubset:
    """A - B."""
    return sumset(A, B.negate())


def iterated_sumset(B: GroupSubset, l: int) -> GroupSubset:
    """lB = B + ... + B (l copies); 0B = {0}. Computed by repeated doubling."""
    if l < 0:
        raise InputError(f"iterated sumset needs l >= 0, got {l}")
    result = GroupSubset.from_members(B.group, [0])
    power = B
    while l:
        if l & 1:
            result = sumset(result, power)
        l >>= 1
        if l:
            doubled = sumset(power, power)
            if doubled == power:
                # power is a subgroup, so any further copies add nothing
                return sumset(result, power)
            power = doubled
    return result


def measure_power(mu: DensityWeight, k: int) -> DensityWeight:
    """mu^{*k}, the k-fold convolution power; mu^{*0} is the point mass at 0."""
    if k < 0:
        raise InputError(f"convolution power needs k >= 0, got {k}")
    result = DensityWeight.point_mass(mu.group, 0)
    power = mu
    while k:
        if k & 1:
            result = convolve_measures(result, power)
        k >>= 1
        if k:
            power = convolve_measures(power, power)
    return result


def fourfold_measure(B1: GroupSubset, B2: GroupSubset) -> DensityWeight:
    """mu~_{B1} * mu~_{B2} * mu_{B2} * mu_{B1}, positive definite with support B1 + B2 - B2 - B1."""
    mu1 = DensityWeight.uniform_on(B1)
    mu2 = DensityWeight.uniform_on(B2)
    mu = convolve_all(mu1.reflect(), mu2.reflect(), mu2, mu1)
    if not is_positive_definite(mu):
        raise ContractError("four-fold measure is not positive definite")
    return mu
