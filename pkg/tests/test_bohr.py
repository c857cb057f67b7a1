import math

import pytest

from src.bohr.bohr_sets import (
    build_bohr,
    character_rigidity,
    clamp_width,
    dilate_bohr,
    find_regular_pair,
    growth_check,
    regular_pair_check,
)
from src.config import MIN_WIDTH
from src.errors import BudgetExceeded, HypothesisFail, InputError
from src.harmonics.groups import FiniteGroup, GroupSubset, dilate


def test_bohr_set_of_frequency_one_is_an_interval(z101):
    bohr = build_bohr(z101, [1], 2 * math.sin(math.pi * 10 / 101))
    assert bohr.members == GroupSubset.from_members(z101, range(-10, 11))
    assert bohr.d == 1
    assert bohr.size == 21


def test_bohr_width_two_is_the_whole_group(z101):
    assert build_bohr(z101, [3, 7], 2.0).size == 101


def test_frequencies_are_reduced_and_deduplicated(z101):
    assert build_bohr(z101, [1, 102, -100], 1.0).frequencies == (1,)


@pytest.mark.parametrize("width", [0.0, -1.0, 2.5])
def test_bad_width(z101, width):
    with pytest.raises(InputError):
        build_bohr(z101, [1], width)


def test_bohr_sets_need_a_cyclic_group():
    with pytest.raises(InputError):
        build_bohr(FiniteGroup.vector(3, 2), [1], 1.0)


def test_dilation_moves_frequencies(z101):
    bohr = build_bohr(z101, [1], 0.5)
    dilated = dilate_bohr(bohr, 3)
    assert dilated.members == dilate(bohr.members, 3)
    assert dilated.frequencies == (34,)  # 3^-1 mod 101


def test_clamp_width():
    assert clamp_width(0.0) == MIN_WIDTH
    assert clamp_width(5.0) == 2.0
    assert clamp_width(0.3) == 0.3


def test_growth_check_passes(z101):
    verdict = growth_check(z101, [1, 5], 0.5)
    assert verdict.passed
    assert verdict.lemma == "growth"
    assert verdict.lhs <= verdict.rhs


def test_regular_pair_on_an_interval(z101):
    # delta' is below every nonzero |gamma(x) - 1|, so B' = {0} and the first candidate works
    pair = find_regular_pair(z101, [1], 1.0, l=1, eta=0.5, grid=64)
    assert pair.delta_star == 0.5
    assert pair.prime.size == 1
    assert pair.measured_ratio == 1.0
    assert regular_pair_check(z101, [1], 1.0, 1, 0.5, 64).passed


def test_regular_pair_with_empty_grid(z101):
    with pytest.raises(BudgetExceeded):
        find_regular_pair(z101, [1], 1.0, l=1, eta=0.5, grid=0)


def test_regular_pair_rejects_bad_eta(z101):
    with pytest.raises(InputError):
        find_regular_pair(z101, [1], 1.0, l=1, eta=1.5, grid=4)


def test_rigidity_on_trivial_companion(z101, interval_101):
    zero = GroupSubset.from_members(z101, [0])
    assert character_rigidity(interval_101, zero, 0, 0.1, 0.5) == 0.0


def test_rigidity_hypothesis_failure(z101, interval_101):
    zero = GroupSubset.from_members(z101, [0])
    with pytest.raises(HypothesisFail) as excinfo:
        character_rigidity(interval_101, zero, 1, 0.1, 1.0)
    assert excinfo.value.checks
