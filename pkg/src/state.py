"""State definitions for the density-increment tracers."""
from typing import Any, TypedDict, Unpack

from src.harmonics.groups import GroupSubset
from src.increment.records import CaseLabel, TraceOutcome, TraceStep

# Python 3.12+ type aliases for semantic clarity
type ClassIndex = int
type SRow = list[float]
type Frequencies = list[int]
type StateDump = dict[str, Any]


class ToyTraceState(TypedDict):
    """State of the subspace iteration in F_q^n.

    The structured set V_i is carried both as a member mask and as the
    frequencies whose kernels cut it out of G.
    """

    # Input
    group: Any  # FiniteGroup
    classes: list[Any]  # GroupSubset per colour class
    a: int
    b: int
    config: Any  # ToyConfig

    # Processing
    step: int
    subspace: Any  # GroupSubset V_i
    kernel: Frequencies  # V_i is the common kernel of these characters
    s_row: SRow
    chosen_class: ClassIndex | None
    case: CaseLabel | None
    counts: list[int]
    pending: dict[str, Any]  # measurements of the current step before it is recorded

    # Output
    steps: list[TraceStep]
    gain_counts: list[int]
    outcome: TraceOutcome | None

    # Metadata
    processing_log: list[str]


class ZpTraceState(TypedDict):
    """State of the Bohr-set iteration in Z/pZ."""

    # Input
    group: Any  # FiniteGroup Z/pZ
    classes: list[Any]  # GroupSubset per colour class of {-N..N} mod p
    integer_classes: list[list[int]]  # the same classes as integers, for the oracle
    n: int
    a: int
    b: int
    config: Any  # ZpConfig

    # Processing
    step: int
    frequencies: Frequencies  # Gamma_i
    width: float  # delta_i
    bohr: Any  # BohrSet B(Gamma_i, delta_i)
    s_row: SRow
    chosen_class: ClassIndex | None
    case: CaseLabel | None
    counts: list[int]
    chain: list[Any]  # BohrSet B0..B5 of the current step
    pending: dict[str, Any]

    # Output
    steps: list[TraceStep]
    gain_counts: list[int]
    outcome: TraceOutcome | None

    # Metadata
    processing_log: list[str]


def create_toy_state(
    group: Any,
    classes: list[Any],
    a: int,
    b: int,
    config: Any,
    **kwargs: Unpack[ToyTraceState],
) -> ToyTraceState:
    """
    Create a ToyTraceState with V_0 = G and empty trace.

    Args:
        group: The vector space F_q^n
        classes: Colour classes as GroupSubsets covering the group
        a: Scalar on the difference side of a(x - y) = bz
        b: Scalar on the single side
        config: Tracer configuration
        **kwargs: Additional ToyTraceState fields to override defaults

    Returns:
        Complete ToyTraceState with all required fields
    """
    defaults: ToyTraceState = {
        "group": group,
        "classes": classes,
        "a": a,
        "b": b,
        "config": config,
        "step": 0,
        "subspace": GroupSubset.full(group),
        "kernel": [],
        "s_row": [],
        "chosen_class": None,
        "case": None,
        "counts": [],
        "pending": {},
        "steps": [],
        "gain_counts": [0] * len(classes),
        "outcome": None,
        "processing_log": [],
    }
    return {**defaults, **kwargs}


def create_zp_state(
    group: Any,
    classes: list[Any],
    integer_classes: list[list[int]],
    n: int,
    a: int,
    b: int,
    bohr: Any,
    config: Any,
    **kwargs: Unpack[ZpTraceState],
) -> ZpTraceState:
    """
    Create a ZpTraceState starting from the embedded interval B(Gamma_0, delta_0).

    Returns:
        Complete ZpTraceState with all required fields
    """
    defaults: ZpTraceState = {
        "group": group,
        "classes": classes,
        "integer_classes": integer_classes,
        "n": n,
        "a": a,
        "b": b,
        "config": config,
        "step": 0,
        "frequencies": list(bohr.frequencies),
        "width": bohr.width,
        "bohr": bohr,
        "s_row": [],
        "chosen_class": None,
        "case": None,
        "counts": [],
        "chain": [],
        "pending": {},
        "steps": [],
        "gain_counts": [0] * len(classes),
        "outcome": None,
        "processing_log": [],
    }
    return {**defaults, **kwargs}
