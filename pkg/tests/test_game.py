from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from loguru import logger

import src.bohr.game as game_module
from src.bohr.game import game_density, hereditary_density_check
from src.errors import HypothesisFail, InputError
from src.harmonics.groups import FiniteGroup, GroupSubset


@pytest.fixture
def z5() -> FiniteGroup:
    return FiniteGroup.cyclic(5)


def test_singleton_against_whole_group_is_uniform(z5):
    value = game_density(GroupSubset.from_members(z5, [0]), GroupSubset.full(z5))
    assert value.method == "exact"
    assert value.fraction == Fraction(1, 5)
    assert value.gap == 0.0


def test_point_support_gives_one(z101, interval_101):
    value = game_density(interval_101, GroupSubset.from_members(z101, [0]))
    assert value.value == pytest.approx(1.0)


def test_trivial_sets(z101, interval_101):
    assert game_density(GroupSubset.empty(z101), interval_101).value == 0.0
    full = game_density(GroupSubset.full(z101), interval_101)
    assert full.value == 1.0
    assert full.method == "trivial"


def test_empty_support_is_rejected(z101, interval_101):
    with pytest.raises(InputError):
        game_density(interval_101, GroupSubset.empty(z101))


def test_game_value_is_at_least_the_density(z101, interval_101):
    rng = np.random.default_rng(11)
    A = GroupSubset(group=z101, mask=rng.random(101) < 0.4)
    value = game_density(A, interval_101)
    assert value.value >= A.density - 1e-9
    assert value.lower <= value.upper + 1e-12
    nu = value.measure(interval_101)
    assert nu.support().issubset(interval_101)


def test_hereditary_density_with_trivial_companion(z101, interval_101):
    rng = np.random.default_rng(5)
    A = GroupSubset(group=z101, mask=rng.random(101) < 0.5)
    zero = GroupSubset.from_members(z101, [0])
    verdict = hereditary_density_check(A, interval_101, zero, 0.01)
    assert verdict.passed
    assert verdict.lhs == pytest.approx(1.0)


def test_hereditary_density_needs_small_growth(z101, interval_101):
    A = GroupSubset.from_members(z101, [1, 2, 3])
    with pytest.raises(HypothesisFail):
        hereditary_density_check(A, GroupSubset.from_members(z101, [0]), interval_101, 0.1)


def test_worked_instance_in_z5(z5):
    value = game_density(GroupSubset.from_members(z5, [0, 1]), GroupSubset.from_members(z5, [0, 1, 2]))
    assert value.method == "exact"
    assert value.fraction == Fraction(1, 2)


def _vertex_value(A: GroupSubset, support: GroupSubset) -> float:
    """min over nu of max_y (M nu)_y by enumerating the basic solutions of the game LP."""
    group = A.group
    columns = support.members()
    M = np.array(
        [[float(A.mask[group.add(y, group.neg(x))]) for x in columns] for y in range(group.order)]
    )
    m = len(columns)
    best = np.inf
    for s in range(1, m + 1):
        for cols in combinations(range(m), s):
            for rows in combinations(range(group.order), s):
                system = np.zeros((s + 1, s + 1))
                system[:s, :s] = M[np.ix_(rows, cols)]
                system[:s, s] = -1.0
                system[s, :s] = 1.0
                rhs = np.zeros(s + 1)
                rhs[s] = 1.0
                try:
                    solution = np.linalg.solve(system, rhs)
                except np.linalg.LinAlgError:
                    continue
                nu = np.zeros(m)
                nu[list(cols)] = solution[:s]
                if nu.min() < -1e-12 or abs(nu.sum() - 1) > 1e-9:
                    continue
                best = min(best, float((M @ nu).max()))
    return best


@pytest.mark.parametrize("group", [
    FiniteGroup.cyclic(5), FiniteGroup.cyclic(7), FiniteGroup.cyclic(11), FiniteGroup.cyclic(13),
    FiniteGroup.vector(3, 2),
], ids=lambda group: group.label)
def test_game_value_matches_vertex_enumeration(group):
    rng = np.random.default_rng(group.order)
    for _ in range(4):
        A = GroupSubset(group=group, mask=rng.random(group.order) < 0.45)
        support = GroupSubset.from_members(
            group, rng.choice(group.order, size=int(rng.integers(1, 5)), replace=False).tolist()
        )
        value = game_density(A, support)
        assert value.value == pytest.approx(_vertex_value(A, support), abs=1e-9)


def test_failed_certification_is_reported(z101, interval_101, monkeypatch):
    monkeypatch.setattr(game_module, "_certify_exact", lambda *args: None)
    warnings = []
    handler = logger.add(warnings.append, level="WARNING", format="{message}")
    try:
        value = game_density(interval_101, GroupSubset.from_members(z101, [0, 3, 7]))
    finally:
        logger.remove(handler)
    assert value.method == "approximate"
    assert value.gap <= 1e-6
    assert any("exact certification failed" in message for message in warnings)
