"""Hypothesis checks for the lemma engines and invariant checks for tracer records."""
from loguru import logger

from src.applemmas.verdicts import HypothesisCheck, Relation, holds
from src.config import COMPLEX_TOL
from src.errors import HypothesisFail
from src.increment.records import TraceRecord

type ValidationResult = tuple[bool, list[str]]


class HypothesisValidator:
    """Collect measured-vs-required checks for one engine instance."""

    def __init__(self, lemma: str):
        self.lemma = lemma
        self.checks: list[HypothesisCheck] = []

    def require(self, name: str, measured: float, relation: Relation, bound: float) -> bool:
        """Record that ``measured relation bound`` must hold."""
        passed = holds(float(measured), relation, float(bound))
        self.checks.append(
            HypothesisCheck(
                name=name,
                measured=float(measured),
                bound=float(bound),
                relation=relation,
                passed=passed,
            )
        )
        return passed

    def require_true(self, name: str, condition: bool) -> bool:
        """Record a boolean hypothesis such as a set inclusion."""
        return self.require(name, 1.0 if condition else 0.0, ">=", 1.0)

    def validate(self) -> ValidationResult:
        """
        Evaluate the recorded hypotheses.

        Returns:
            Tuple of (is_valid, list of error messages)
        """
        errors = [
            f"{check.name}: measured {check.measured:.6g} violates {check.relation} {check.bound:.6g}"
            for check in self.checks
            if not check.passed
        ]
        is_valid = len(errors) == 0

        if not is_valid:
            logger.warning(f"{self.lemma}: {len(errors)} hypothesis check(s) failed")
            for error in errors:
                logger.warning(f"  - {error}")

        return is_valid, errors

    def raise_if_failed(self) -> list[HypothesisCheck]:
        """Return the checks when all pass, else raise HypothesisFail carrying them."""
        is_valid, errors = self.validate()
        if not is_valid:
            raise HypothesisFail(
                f"{self.lemma}: hypotheses fail: {'; '.join(errors)}",
                checks=[check.model_dump() for check in self.checks],
            )
        return self.checks


class TraceValidator:
    """Validate tracer records against the invariants of the iteration."""

    def validate(self, record: TraceRecord) -> ValidationResult:
        """
        Validate a finished trace.

        Args:
            record: Trace to check

        Returns:
            Tuple of (is_valid, list of error messages)
        """
        errors = []

        errors.extend(self._validate_s_bounds(record))
        errors.extend(self._validate_monotone(record))
        errors.extend(self._validate_gain_counts(record))
        errors.extend(self._validate_nesting(record))
        errors.extend(self._validate_outcome(record))

        is_valid = len(errors) == 0

        if is_valid:
            logger.info(f"{record.kind} trace passed validation")
        else:
            logger.warning(f"{record.kind} trace failed validation with {len(errors)} errors")
            for error in errors:
                logger.warning(f"  - {error}")

        return is_valid, errors

    def _validate_s_bounds(self, record: TraceRecord) -> list[str]:
        """Every S-entry is a density of a translate, so lies in [0, 1]."""
        errors = []
        for step in record.steps:
            for j, s in enumerate(step.s_row):
                if s < -COMPLEX_TOL or s > 1 + COMPLEX_TOL:
                    errors.append(f"step {step.step}: S[{j}] = {s} outside [0, 1]")
        return errors

    def _validate_monotone(self, record: TraceRecord) -> list[str]:
        """S_{i+1,j} >= S_{i,j} for every class."""
        errors = []
        for previous, current in zip(record.steps, record.steps[1:]):
            for j, (before, after) in enumerate(zip(previous.s_row, current.s_row)):
                if after < before - COMPLEX_TOL:
                    errors.append(
                        f"S[{j}] decreased from {before:.6f} to {after:.6f} "
                        f"between steps {previous.step} and {current.step}"
                    )
        return errors

    def _validate_gain_counts(self, record: TraceRecord) -> list[str]:
        errors = []
        for j, gains in enumerate(record.gain_counts):
            if gains > record.gain_bound:
                errors.append(f"class {j} gained {gains} times, above the bound {record.gain_bound}")
        return errors

    def _validate_nesting(self, record: TraceRecord) -> list[str]:
        return [
            f"step {step.step}: structured set is not contained in its predecessor"
            for step in record.steps
            if not step.nested
        ]

    def _validate_outcome(self, record: TraceRecord) -> list[str]:
        errors = []
        outcome = record.outcome
        if outcome is None:
            errors.append("trace has no outcome")
            return errors
        if outcome.status == "terminated":
            if outcome.count is None or outcome.oracle_count is None:
                errors.append("terminated trace is missing its count or oracle count")
            elif outcome.count != outcome.oracle_count:
                errors.append(
                    f"final count {outcome.count} differs from the enumeration oracle "
                    f"{outcome.oracle_count}"
                )
        return errors
