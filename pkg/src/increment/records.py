"""Trace records emitted by the density-increment tracers."""
from typing import Any, Literal

from pydantic import BaseModel, Field

type CaseLabel = Literal["case1", "increment", "cd1", "cd0", "cd2", "flagged"]
type TraceStatus = Literal["terminated", "flagged"]


class TraceStep(BaseModel):
    """Snapshot of one iteration: the structured set, its S-row and the case taken."""

    step: int
    case: CaseLabel
    chosen_class: int | None = None
    s_row: list[float]
    structure_size: int
    codimension: int | None = None
    frequencies: list[int] | None = None
    width: float | None = None
    count: int | None = None
    count_threshold: float | None = None
    translate: int | None = None
    density_before: float | None = None
    density_after: float | None = None
    nested: bool = True
    notes: dict[str, Any] = Field(default_factory=dict)


class TraceOutcome(BaseModel):
    status: TraceStatus
    final_class: int | None = None
    count: int | None = None
    oracle_count: int | None = None
    verified: bool = False
    reason: str | None = None
    state_dump: dict[str, Any] = Field(default_factory=dict)


class TraceRecord(BaseModel):
    """Full trace of one tracer run plus its verified outcome."""

    kind: Literal["toy", "zp"]
    parameters: dict[str, Any]
    steps: list[TraceStep] = Field(default_factory=list)
    outcome: TraceOutcome | None = None
    gain_counts: list[int] = Field(default_factory=list)
    gain_bound: int = 0

    def summary_rows(self) -> list[dict[str, Any]]:
        """CSV rows: step, case, j, S-row, structure size, d_i / codimension, width."""
        rows = []
        for step in self.steps:
            rows.append({
                "step": step.step,
                "case": step.case,
                "j": step.chosen_class,
                "s_row": " ".join(f"{s:.6f}" for s in step.s_row),
                "size": step.structure_size,
                "d": len(step.frequencies) if step.frequencies is not None else step.codimension,
                "width": step.width,
                "count": step.count,
            })
        return rows
