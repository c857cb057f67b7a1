import math

import pytest

from src.applemmas.constants import ConstantBook
from src.applemmas.pipeline import iteration_parameters
from src.equation.rado_criterion import IntervalColouring
from src.errors import BudgetExceeded, ConstantsMismatch, InputError
from src.increment.zp import (
    ZpConfig,
    build_chain,
    cd1_threshold,
    embed_interval,
    random_interval_colouring,
    sign_colouring,
    zp_iterate,
)
from src.validation.validator import TraceValidator

WHOLE_INTERVAL = IntervalColouring(n=20, signed=True, classes=[list(range(-20, 21))])


@pytest.mark.parametrize("n,a,b,p", [(10, 1, 1, 31), (1, 1, 1, 5), (10, 2, 3, 71), (20, 1, 1, 61)])
def test_embed_interval(n, a, b, p):
    prime, bohr = embed_interval(n, a, b)
    assert prime == p
    assert bohr.size == 2 * n + 1
    assert bohr.frequencies == (1,)


def test_embed_interval_rejects_zero_coefficients():
    with pytest.raises(InputError):
        embed_interval(10, 0, 1)
    with pytest.raises(InputError):
        embed_interval(0, 1, 1)


def test_cd1_threshold():
    assert cd1_threshold(1.0, 1, 1, 1, 1, exponent=1.0) == 0.5
    assert cd1_threshold(2.0, 2, 2, 1, 1, exponent=1.0) == pytest.approx((2 / 8) ** 2)


def test_single_class_terminates_at_step_zero():
    record = zp_iterate(WHOLE_INTERVAL, 1, 1)
    assert record.parameters["p"] == 61
    assert [step.case for step in record.steps] == ["cd1"]
    step = record.steps[0]
    assert step.count == 1261
    width = 2 * math.sin(math.pi * 20 / 61)
    assert step.count_threshold == pytest.approx((width / 2) ** 8 * 61**2)
    assert record.outcome.status == "terminated"
    assert record.outcome.oracle_count == 1261
    assert record.outcome.verified


def test_sign_colouring_terminates_with_the_positive_class():
    record = zp_iterate(sign_colouring(50), 1, 1)
    assert record.parameters["p"] == 151
    assert record.outcome.status == "terminated"
    assert record.outcome.final_class == 0
    assert record.outcome.count == 1225
    assert record.outcome.oracle_count == 1225


def test_unsigned_colouring_is_lifted():
    record = zp_iterate(IntervalColouring(n=10, classes=[list(range(1, 11))]), 1, 1)
    assert record.parameters["r"] == 3
    assert record.outcome.verified


def test_chain_is_built_when_the_count_falls_short():
    config = ZpConfig(n=20, cd1_exponent=0.5, book=ConstantBook.desk())
    record = zp_iterate(WHOLE_INTERVAL, 1, 1, config)

    assert record.outcome.status == "terminated"
    step = record.steps[-1]
    assert step.case == "cd1"
    assert step.count == 1261
    assert step.count_threshold > 1261
    assert (step.notes["k"], step.notes["l"], step.notes["m"]) == (1, 4, 20)
    assert step.notes["chain"]["sizes"][0] == 17


def test_exhausted_grid_is_flagged():
    config = ZpConfig(n=20, cd1_exponent=0.5, grid=0)
    record = zp_iterate(WHOLE_INTERVAL, 1, 1, config)
    assert record.outcome.status == "flagged"
    assert record.outcome.state_dump["error"] == "BudgetExceeded"
    assert record.steps[-1].case == "flagged"


def test_build_chain_with_empty_grid():
    _, bohr = embed_interval(20, 1, 1)
    with pytest.raises(BudgetExceeded):
        build_chain(bohr, 1, 1, 1, 1, 4, 20, grid=0)


def test_random_interval_colouring_is_signed():
    colouring = random_interval_colouring(15, 3, seed=2)
    assert colouring.signed
    assert colouring.n == 15
    assert sum(len(members) for members in colouring.classes) == 31


def test_sparse_central_class_takes_a_cd0_step():
    # the chain's B1 is {0}, so the four-fold mass picks the class of 0, whose S on {-30..30} is below 1/4
    central = list(range(-5, 6))
    colouring = IntervalColouring(
        n=30, signed=True, classes=[central, [x for x in range(-30, 31) if abs(x) > 5]],
    )
    config = ZpConfig(n=30, cd1_exponent=0.05, book=ConstantBook.desk())
    record = zp_iterate(colouring, 1, 1, config)

    first = record.steps[0]
    assert first.case == "cd0"
    assert first.chosen_class == 0
    assert first.structure_size == 61
    assert first.density_before < 0.25
    assert first.density_after == pytest.approx(1.0)
    assert len(record.steps) >= 2
    assert record.steps[1].structure_size < first.structure_size
    assert set(record.steps[1].frequencies) >= set(first.frequencies)
    assert all(step.nested for step in record.steps)
    is_valid, errors = TraceValidator().validate(record)
    assert is_valid, errors


def test_default_book_chain_underflow_is_a_constants_mismatch():
    _, bohr = embed_interval(30, 1, 1)
    params = iteration_parameters(1 / 4, 1 / 2)
    with pytest.raises(ConstantsMismatch):
        build_chain(bohr, 1, 1, 2, params.k, params.l, params.m, grid=16)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_default_book_traces_flag_the_constants(seed):
    config = ZpConfig(n=30, cd1_exponent=0.5, grid=16)
    record = zp_iterate(random_interval_colouring(30, 2, seed), 1, 1, config)
    assert record.outcome.status == "flagged"
    assert record.outcome.state_dump["error"] == "ConstantsMismatch"
