import pytest

from src.equation.rado_criterion import (
    CoefficientVector,
    IntervalColouring,
    RegularityWitness,
    assemble_solution,
    is_invariant,
    is_partition_regular,
    lift_colouring,
    lift_solution,
    reduce_to_triple,
    restrict_to_positive,
)
from src.errors import ContractError, InputError


def test_parse_coefficients():
    a = CoefficientVector.parse("1, 1, -1")
    assert a.entries == (1, 1, -1)
    assert a.d == 3


def test_parse_rejects_garbage():
    with pytest.raises(InputError):
        CoefficientVector.parse("1,x,-1")


def test_schur_equation_is_regular():
    witness = is_partition_regular(CoefficientVector.of([1, 1, -1]))
    assert witness is not None
    assert witness.index_set == (1, 3)
    assert witness.pivot == 1
    assert witness.residual == -1


def test_equation_without_zero_sum_subset_is_not_regular():
    assert is_partition_regular(CoefficientVector.of([1, 2])) is None
    assert is_partition_regular(CoefficientVector.of([3, 1, -1, -1, 5])) is not None


def test_invariant_equation_reduces_with_zero_b():
    a = CoefficientVector.of([1, 1, -2])
    assert is_invariant(a)
    a_j, b, witness = reduce_to_triple(a)
    assert b == 0
    assert witness.pivot in witness.index_set


def test_reduce_non_regular_raises():
    with pytest.raises(InputError):
        reduce_to_triple(CoefficientVector.of([1, 2]))


def test_colouring_must_partition_domain():
    with pytest.raises(ValueError):
        IntervalColouring(n=3, classes=[[1, 2]])


def test_lift_colouring_doubles_classes_and_adds_zero():
    c = IntervalColouring(n=3, classes=[[1, 3], [2]])
    lifted = lift_colouring(c)
    assert lifted.signed
    assert lifted.r == 5
    assert sorted(x for members in lifted.classes for x in members) == list(range(-3, 4))
    assert [0] in lifted.classes


def test_restrict_undoes_the_lift():
    c = IntervalColouring(n=3, classes=[[1, 3], [2]])
    assert restrict_to_positive(lift_colouring(c)) == c


def test_lift_solution_flips_negated_triples():
    a = CoefficientVector.parse("1,1,-1")
    witness = is_partition_regular(a)
    assert lift_solution(1, 3, 2, False, witness, a) == (1, 2, 3)
    assert lift_solution(-1, -3, -2, True, witness, a) == (1, 2, 3)


def test_assemble_solution_for_schur():
    a = CoefficientVector.of([1, 1, -1])
    assert assemble_solution(1, 3, 2, is_partition_regular(a), a) == (1, 2, 3)


def test_assemble_solution_checks_its_precondition():
    a = CoefficientVector.of([2, -2, 3])
    witness = RegularityWitness(index_set=(1, 2), pivot=1, residual=-3)
    # 2*0 - 2*3 = -3*2
    assert assemble_solution(0, 3, 2, witness, a) == (0, 3, 2)
    with pytest.raises(ContractError):
        assemble_solution(3, 0, 2, witness, a)
