"""Exception hierarchy shared by every engine and mapped to CLI exit codes."""
from typing import Any


class RadoError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details


class InputError(RadoError):
    """Malformed or out-of-range input."""

    exit_code = 2


class HypothesisFail(RadoError):
    """Measured hypotheses of an engine do not hold on the given instance."""

    exit_code = 2

    def __init__(self, message: str, checks: list[dict] | None = None, **details: Any):
        super().__init__(message, **details)
        self.checks = checks or []


class ContractError(RadoError):
    """A postcondition or a proven inequality failed: an implementation bug."""

    exit_code = 1


class VerificationFailed(RadoError):
    """A verdict or an oracle comparison did not pass."""

    exit_code = 1


class ConstantsMismatch(RadoError):
    """An engine could not realise its conclusion with the current ConstantBook."""

    exit_code = 1


class BudgetExceeded(RadoError):
    """A search, grid or retry budget ran out before an answer was certified."""

    exit_code = 3
