import numpy as np
import pytest

from src.errors import InputError
from src.harmonics.fourier import (
    convolve,
    count_triples,
    dft,
    enumerate_triples,
    is_positive_definite,
    iterated_sumset,
    large_spectrum,
    measure_power,
    sumset,
)
from src.harmonics.groups import DensityWeight, FiniteGroup, GroupSubset, dilate


def test_parse_group_labels():
    assert FiniteGroup.parse("zp:101").order == 101
    group = FiniteGroup.parse("fq:3^4")
    assert group.order == 81
    assert group.label == "fq:3^4"


@pytest.mark.parametrize("label", ["zp:100", "fq:4^2", "zz:7", "zp:abc"])
def test_bad_group_labels(label):
    with pytest.raises(InputError):
        FiniteGroup.parse(label)


def test_subset_json_round_trip(z101):
    A = GroupSubset.from_members(z101, [0, 5, 99])
    assert GroupSubset.from_json(A.to_json()) == A


@pytest.mark.parametrize("a,b", [(1, 1), (2, 3), (5, 7)])
def test_fft_count_matches_enumeration_in_zp(z101, a, b):
    rng = np.random.default_rng(a * 10 + b)
    A = GroupSubset(group=z101, mask=rng.random(101) < 0.3)
    assert count_triples(A, a, b) == enumerate_triples(A, a, b)


def test_fft_count_matches_enumeration_in_vector_space(f3_4):
    rng = np.random.default_rng(7)
    A = GroupSubset(group=f3_4, mask=rng.random(81) < 0.4)
    assert count_triples(A, 1, 2) == enumerate_triples(A, 1, 2)


def test_count_on_small_interval(z101):
    # {1..10}: x - y = z has one solution per pair x > y
    A = GroupSubset.from_members(z101, range(1, 11))
    assert count_triples(A, 1, 1) == 45


def test_count_on_whole_group(f3_4):
    assert count_triples(GroupSubset.full(f3_4), 1, 1) == 81**2


def test_dilation_by_zero_is_rejected(z101):
    with pytest.raises(InputError):
        dilate(GroupSubset.full(z101), 0)


def test_parseval(z101):
    rng = np.random.default_rng(3)
    f = rng.random(101)
    assert np.isclose(np.sum(np.abs(dft(f, z101)) ** 2), np.mean(f**2))


def test_large_spectrum_contains_zero(z101, interval_101):
    spectrum = large_spectrum(interval_101, GroupSubset.full(z101), 0.5)
    assert 0 in spectrum


def test_large_spectrum_needs_a_subset(z101, interval_101):
    with pytest.raises(InputError):
        large_spectrum(GroupSubset.full(z101), interval_101, 0.5)


def test_iterated_sumset_of_interval(z101):
    B = GroupSubset.from_members(z101, [100, 0, 1])
    assert iterated_sumset(B, 3) == GroupSubset.from_members(z101, [x % 101 for x in range(-3, 4)])
    assert iterated_sumset(B, 0) == GroupSubset.from_members(z101, [0])
    assert sumset(B, B).size == 5


def test_measure_power_is_a_probability(z101, interval_101):
    mu = measure_power(DensityWeight.uniform_on(interval_101), 3)
    assert np.isclose(mu.weights.sum(), 1.0)
    assert mu.support().size == 61


def test_fft_count_matches_enumeration_on_random_instances():
    groups = [FiniteGroup.cyclic(p) for p in (31, 101, 401)] + [FiniteGroup.vector(3, n) for n in range(2, 6)]
    rng = np.random.default_rng(2)
    for _ in range(100):
        group = groups[int(rng.integers(len(groups)))]
        A = GroupSubset(group=group, mask=rng.random(group.order) < rng.uniform(0.05, 0.6))
        a, b = (int(c) for c in rng.integers(1, group.q, size=2))
        assert count_triples(A, a, b) == enumerate_triples(A, a, b), (group.label, a, b)


def test_count_in_z7():
    A = GroupSubset.from_members(FiniteGroup.cyclic(7), [1, 2, 4])
    assert count_triples(A, 1, 2) == 3
    assert enumerate_triples(A, 1, 2) == 3


def test_convolution_theorem():
    groups = [FiniteGroup.cyclic(p) for p in (5, 31, 101, 727)] + [FiniteGroup.vector(3, n) for n in range(2, 7)]
    rng = np.random.default_rng(5)
    for _ in range(200):
        group = groups[int(rng.integers(len(groups)))]
        f = rng.standard_normal(group.order)
        g = rng.standard_normal(group.order)
        assert np.allclose(dft(convolve(f, g, group), group), dft(f, group) * dft(g, group), rtol=0, atol=1e-9)


@pytest.mark.parametrize("group", [FiniteGroup.cyclic(101), FiniteGroup.vector(3, 4)], ids=["zp", "fq"])
def test_count_is_invariant_under_dilation(group):
    rng = np.random.default_rng(11)
    for _ in range(10):
        A = GroupSubset(group=group, mask=rng.random(group.order) < 0.3)
        a, b, c = (int(x) for x in rng.integers(1, group.q, size=3))
        assert count_triples(dilate(A, c), a, b) == count_triples(A, a, b)


def test_positive_definiteness():
    z3 = FiniteGroup.cyclic(3)
    assert not is_positive_definite(DensityWeight.point_mass(z3, 1))
    assert is_positive_definite(DensityWeight.point_mass(z3, 0))
    assert is_positive_definite(DensityWeight.haar(z3))
