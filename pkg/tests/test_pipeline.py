import pytest

from src.applemmas.constants import ConstantBook
from src.applemmas.generators import GENERATORS, run_suite
from src.applemmas.pipeline import iteration_parameters, iteration_step
from src.errors import InputError
from src.harmonics.groups import GroupSubset


def test_desk_iteration_parameters():
    params = iteration_parameters(0.5, 1.0, ConstantBook.desk())
    assert (params.k, params.l, params.m) == (1, 4, 20)


def test_default_parameters_grow_with_smaller_alpha():
    wide = iteration_parameters(0.5, 0.5)
    narrow = iteration_parameters(0.1, 0.5)
    assert narrow.l > wide.l
    assert narrow.m > wide.m


@pytest.mark.parametrize("alpha,delta", [(0.0, 0.5), (0.5, 0.0), (1.5, 0.5)])
def test_parameters_reject_out_of_range(alpha, delta):
    with pytest.raises(InputError):
        iteration_parameters(alpha, delta)


def test_iteration_step_needs_six_sets(z101, interval_101):
    with pytest.raises(InputError):
        iteration_step(interval_101, interval_101, [interval_101] * 5, 1, 1, 1, 0.5)


def test_iteration_step_rejects_empty_links(z101, interval_101):
    chain = [interval_101] * 5 + [GroupSubset.empty(z101)]
    with pytest.raises(InputError):
        iteration_step(interval_101, interval_101, chain, 1, 1, 1, 0.5)


def test_every_engine_has_a_generator():
    assert set(GENERATORS) == {
        "growth", "regular", "rigidity", "hereditary", "specpos", "sift",
        "chang", "changbound", "cs", "propd", "itstep",
    }


def test_growth_suite_passes():
    report = run_suite("growth", 101, 5, seed=1)
    assert report.produced == 5
    assert report.all_passed
    assert report.summary()["passed"] == 5


def test_suites_are_reproducible():
    first = run_suite("regular", 101, 3, seed=4)
    second = run_suite("regular", 101, 3, seed=4)
    assert [v.model_dump() for v in first.verdicts] == [v.model_dump() for v in second.verdicts]


def test_chang_suite_on_401():
    report = run_suite("chang", 401, 10, seed=3)
    assert report.produced == 10
    assert report.all_passed


def test_unknown_lemma():
    with pytest.raises(InputError):
        run_suite("nonsense", 101, 3)


def test_instance_count_must_be_positive():
    with pytest.raises(InputError):
        run_suite("growth", 101, 0)


@pytest.mark.parametrize("lemma", ["specpos", "rigidity", "hereditary"])
def test_inequality_suites(lemma):
    report = run_suite(lemma, 101, 200, seed=7)
    assert report.produced == 200
    assert report.all_passed, report.summary()


@pytest.mark.parametrize("lemma,book", [
    ("sift", ConstantBook.desk()),
    ("sift", ConstantBook()),
    ("cs", ConstantBook()),
], ids=["sift-desk", "sift-default", "cs"])
def test_engine_suites(lemma, book):
    report = run_suite(lemma, 101, 50, seed=7, book=book)
    assert report.produced == 50
    assert report.all_passed, report.summary()


def test_prop_d_suite_builds_nontrivial_bohr_sets():
    report = run_suite("propd", 101, 50, seed=5, book=ConstantBook.desk())
    assert report.produced == 50
    assert report.all_passed, report.summary()
    for verdict in report.verdicts:
        assert verdict.details["rank"] >= 1
        assert verdict.details["support"] > 1
        assert verdict.lhs >= verdict.rhs


def test_iteration_suite():
    report = run_suite("itstep", 101, 50, seed=5, book=ConstantBook.desk())
    assert report.produced == 50
    assert report.all_passed, report.summary()
    many = [v for v in report.verdicts if v.details.get("branch") == "many_solutions"]
    assert many
    assert all(0 < v.lhs < 1 for v in many)
