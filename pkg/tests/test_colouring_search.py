import pytest

from src.equation.rado_criterion import CoefficientVector, IntervalColouring
from src.errors import InputError
from src.search.colouring_search import (
    brute_force_rado,
    count_solutions_interval,
    find_mono_solution,
    rado_number,
    witness_colouring,
)

SCHUR = CoefficientVector.of([1, 1, -1])


def test_two_colour_schur_number():
    result = rado_number(SCHUR, 2, 20)
    assert result.value == 5
    assert not result.inconclusive
    # the certificate colours [4] without a monochromatic solution
    assert result.certificate.n == 4
    assert find_mono_solution(result.certificate, SCHUR) is None


@pytest.mark.parametrize("r,value", [(1, 2), (3, 14)])
def test_schur_numbers(r, value):
    result = rado_number(SCHUR, r, 20)
    assert result.value == value
    assert result.certificate.n == value - 1
    assert find_mono_solution(result.certificate, SCHUR) is None


def test_threaded_search_agrees():
    assert rado_number(SCHUR, 2, 20, threads=4).value == 5


def test_small_budget_is_inconclusive():
    result = rado_number(SCHUR, 2, 4)
    assert result.value is None
    assert result.inconclusive
    assert result.certificate.n == 4


def test_invariant_equation_has_rado_number_one():
    assert rado_number(CoefficientVector.of([1, 1, -2]), 3, 10).value == 1


def test_weak_schur_number_with_distinct_coordinates():
    assert rado_number(SCHUR, 2, 20, distinct=True).value == 9


def test_non_regular_equation_is_rejected():
    with pytest.raises(InputError):
        rado_number(CoefficientVector.of([1, 2]), 2, 10)


def test_brute_force_agrees_with_search():
    assert brute_force_rado(SCHUR, 2, 5)
    assert not brute_force_rado(SCHUR, 2, 4)


def test_witness_colouring():
    colouring = witness_colouring(SCHUR, 2, 4)
    assert colouring is not None
    assert find_mono_solution(colouring, SCHUR) is None
    assert witness_colouring(SCHUR, 2, 5) is None


def test_find_mono_solution_reports_colour_and_solution():
    colouring = IntervalColouring(n=4, classes=[[1, 2, 3], [4]])
    colour, solution = find_mono_solution(colouring, SCHUR)
    assert colour == 0
    x, y, z = solution
    assert x + y == z
    assert {x, y, z} <= {1, 2, 3}


def test_count_solutions_interval():
    assert count_solutions_interval(range(1, 51), 1, 1) == 1225
    assert count_solutions_interval(range(-20, 21), 1, 1) == 1261
    with pytest.raises(InputError):
        count_solutions_interval([1, 2], 0, 1)
