"""Unit checks of the spectral, sifting, Chang and almost-periodicity engines on hand-built instances."""
import math

import numpy as np
import pytest

from src.applemmas.almost_periodic import croot_sisask, croot_sisask_check, sample_count
from src.applemmas.chang import dissociation_test, is_classically_dissociated, riesz_product
from src.applemmas.sifting import pair_correlation, popular_differences, sift
from src.applemmas.specpos import balanced_spectrum, verify_specpos
from src.errors import HypothesisFail, InputError
from src.harmonics.fourier import difference_set, fourfold_measure, sumset
from src.harmonics.groups import DensityWeight, GroupSubset


@pytest.fixture
def zero(z101):
    return GroupSubset.from_members(z101, [0])


@pytest.fixture
def random_set(z101):
    rng = np.random.default_rng(2)
    return GroupSubset(group=z101, mask=rng.random(101) < 0.4)


# === spectral positivity ===

def test_balanced_spectrum_is_nonnegative(random_set, interval_101):
    spectrum = balanced_spectrum(random_set, interval_101)
    assert spectrum.real.min() >= -1e-9
    assert np.abs(spectrum.imag).max() <= 1e-9


def test_specpos_rejects_bad_k(random_set, interval_101, zero):
    mu = DensityWeight.point_mass(random_set.group, 0)
    with pytest.raises(InputError):
        verify_specpos(random_set, interval_101, zero, mu, zero, 0, 0.5, 0.1)


def test_specpos_needs_a_deviation(z101, interval_101, zero):
    # A = B0 makes the difference function exactly alpha^2 mu(B0) at 0: no deviation on D = {0}
    mu = DensityWeight.point_mass(z101, 0)
    with pytest.raises(HypothesisFail):
        verify_specpos(interval_101, interval_101, zero, mu, zero, 1, 0.5, 0.1)


# === sifting ===

def test_pair_correlation(z101, zero):
    assert pair_correlation(zero, zero, zero) == 1.0
    assert pair_correlation(zero, zero, GroupSubset.from_members(z101, [1])) == 0.0
    assert pair_correlation(GroupSubset.empty(z101), zero, zero) == 0.0


def test_popular_differences_stay_in_the_window(random_set, interval_101, zero):
    D = popular_differences(random_set, GroupSubset.full(random_set.group), interval_101, zero, 0.5)
    window = difference_set(sumset(zero, interval_101), sumset(zero, interval_101))
    assert D.issubset(window)


def test_sift_rejects_bad_parameters(random_set, interval_101, zero):
    with pytest.raises(InputError):
        sift(random_set, interval_101, zero, zero, 0, 0.4, 0.5, 0.1)
    with pytest.raises(InputError):
        sift(random_set, interval_101, zero, zero, 4, 0.4, 1.5, 0.1)


# === local Chang ===

def test_classical_dissociation(z101):
    assert is_classically_dissociated(z101, [1, 2, 4])
    assert not is_classically_dissociated(z101, [1, 2, 3])
    assert is_classically_dissociated(z101, [])


def test_riesz_product_with_zero_phases_is_one(z101):
    assert np.allclose(riesz_product(z101, [1, 5], [0, 0]), 1.0)


def test_riesz_product_rejects_large_phases(z101):
    with pytest.raises(InputError):
        riesz_product(z101, [1], [2.0])


def test_dissociation_of_the_empty_set(z101, interval_101):
    report = dissociation_test(z101, [], DensityWeight.uniform_on(interval_101), 1.0)
    assert report.riesz_lower_bound == 1.0
    assert report.dissociated
    assert report.threshold == pytest.approx(math.e)


def test_haar_measure_sees_no_relations(z101):
    # every nontrivial character integrates to zero, so the Riesz product integrates to 1
    report = dissociation_test(z101, [1, 2, 4], DensityWeight.haar(z101), 1.0)
    assert report.riesz_lower_bound == pytest.approx(1.0)
    assert report.dissociated


# === almost periodicity ===

def test_sample_count():
    assert sample_count(2.0, 2.0, 1.0) == 256


def test_constant_function_is_almost_periodic(z101, zero):
    S = GroupSubset.from_members(z101, range(-5, 6))
    result = croot_sisask(np.ones(101), S, S, zero, 2.0, 2.0, 2.0, 0.5)
    assert result.worst_shift == pytest.approx(0.0, abs=1e-9)
    assert result.t == 0
    assert result.density == 1.0
    verdict = croot_sisask_check(np.ones(101), S, S, zero, 2.0, 2.0, 2.0, 0.5)
    assert verdict.passed


def test_almost_periodicity_checks_growth(z101, interval_101, zero):
    with pytest.raises(HypothesisFail):
        croot_sisask(np.ones(101), zero, zero, interval_101, 2.0, 2.0, 2.0, 0.5)


def test_almost_periodicity_rejects_small_p(z101, zero):
    with pytest.raises(InputError):
        croot_sisask(np.ones(101), zero, zero, zero, 1.0, 2.0, 2.0, 0.5)


def test_fourfold_measure_on_points(z101, zero):
    mu = fourfold_measure(zero, zero)
    assert mu.mass(zero) == pytest.approx(1.0)
