import json

import pytest

from src.applemmas.constants import ConstantBook
from src.errors import InputError
from src.harmonics.groups import FiniteGroup, GroupSubset
from src.increment.toy import (
    ToyConfig,
    codimension,
    create_toy_graph,
    flag_colouring,
    gain_bound,
    kernel,
    random_colouring,
    spectral_increment,
    toy_iterate,
)
from src.state import create_toy_state


def test_gain_bound_for_two_colours():
    # ceil(log 4 / log(33/32)) + 1
    assert gain_bound(2) == 47


def test_flag_colouring_partitions(f3_4):
    classes = flag_colouring(f3_4, 3)
    assert len(classes) == 7
    assert sum(A.size for A in classes) == 81
    assert classes[-1].size == 3


def test_flag_colouring_depth_is_checked(f3_4):
    with pytest.raises(InputError):
        flag_colouring(f3_4, 5)


def test_kernel_and_codimension(f3_4):
    K = kernel(f3_4, 1)
    assert K.size == 27
    assert codimension(f3_4, K) == 1
    assert codimension(f3_4, GroupSubset.full(f3_4)) == 0


def test_spectral_increment_finds_the_coordinate_hyperplane(f3_4):
    coords = f3_4.coords
    A = GroupSubset(group=f3_4, mask=coords[:, 0] == 2)
    found = spectral_increment(A, GroupSubset.full(f3_4))
    assert found is not None
    assert found.codimension == 1
    assert found.density == pytest.approx(1.0)
    assert found.previous == pytest.approx(1 / 3)


def test_spectral_increment_needs_a_subset(f3_4):
    V = kernel(f3_4, 1)
    with pytest.raises(InputError):
        spectral_increment(GroupSubset.full(f3_4), V)


def test_single_class_terminates_immediately():
    group = FiniteGroup.vector(3, 3)
    record = toy_iterate([GroupSubset.full(group)], 1, 1)
    assert record.outcome.status == "terminated"
    assert record.outcome.count == 729
    assert record.outcome.verified
    assert [step.case for step in record.steps] == ["case1"]


def test_flag_colouring_needs_one_increment(f3_4):
    record = toy_iterate(flag_colouring(f3_4, 3), 1, 1)

    assert [step.case for step in record.steps] == ["increment", "case1"]
    first, last = record.steps
    assert first.chosen_class == 0
    assert first.count == 9
    assert first.count_threshold == pytest.approx(6561 / 686)
    assert first.density_before == pytest.approx(1 / 3)
    assert first.density_after == pytest.approx(1.0)
    assert first.codimension == 0
    assert last.codimension == 1
    assert last.structure_size == 27

    assert record.outcome.final_class == 6
    assert record.outcome.count == 9
    assert record.outcome.oracle_count == 9
    assert record.gain_counts[0] == 1
    # S never decreases along the trace
    assert all(b >= a - 1e-9 for a, b in zip(first.s_row, last.s_row))


def test_random_colouring_trace_is_reproducible():
    group = FiniteGroup.vector(3, 3)
    config = ToyConfig(q=3, n=3, colours=2, seed=9)
    first = toy_iterate(random_colouring(group, 2, 9), 1, 1, config)
    second = toy_iterate(random_colouring(group, 2, 9), 1, 1, config)
    assert first.model_dump() == second.model_dump()
    assert first.outcome.status in ("terminated", "flagged")


def test_classes_must_partition(f3_4):
    classes = flag_colouring(f3_4, 3)[:-1]
    with pytest.raises(InputError):
        toy_iterate(classes, 1, 1)


def test_non_invertible_coefficient(f3_4):
    with pytest.raises(InputError):
        toy_iterate(flag_colouring(f3_4, 2), 3, 1)


def test_graph_records_its_path(f3_4):
    classes = flag_colouring(f3_4, 3)
    state = create_toy_state(f3_4, classes, 1, 1, ToyConfig())
    final = create_toy_graph().invoke(state, {"recursion_limit": 50})
    assert final['processing_log'][0].startswith("step 0: class 0 gains")
    assert final['processing_log'][-1] == "step 1: case 1 with class 6"


def test_config_file_with_overrides(tmp_path):
    path = tmp_path / "toy.json"
    path.write_text(json.dumps({"q": 5, "n": 2, "colours": 3}))
    config = ToyConfig.load(path, n=3, seed=None)
    assert (config.q, config.n, config.colours) == (5, 3, 3)


def test_gain_bound_follows_the_book():
    # ceil(log 4 / log 1.5) + 1
    assert gain_bound(2, ConstantBook().with_overrides(c32=0.5)) == 5


def test_random_two_colourings_of_f3_4_end_in_case1(f3_4):
    for seed in range(100):
        record = toy_iterate(random_colouring(f3_4, 2, seed), 1, 1, ToyConfig(seed=seed))
        assert record.outcome.status == "terminated", seed
        assert record.steps[-1].case == "case1"
        assert record.outcome.verified
        assert all(gains <= record.gain_bound for gains in record.gain_counts)
