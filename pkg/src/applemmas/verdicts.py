"""Verdict records issued by every lemma engine."""
from typing import Any, Literal

from pydantic import BaseModel, Field

from src.applemmas.constants import ConstantBook
from src.config import COMPLEX_TOL

type Relation = Literal["<=", ">="]


class HypothesisCheck(BaseModel):
    """One measured quantity compared against its required bound."""

    name: str
    measured: float
    bound: float
    relation: Relation
    passed: bool


def holds(lhs: float, relation: Relation, rhs: float, tol: float = COMPLEX_TOL) -> bool:
    if relation == ">=":
        return lhs >= rhs - tol
    return lhs <= rhs + tol


class LemmaVerdict(BaseModel):
    """Record of one engine run: hypotheses measured, conclusion compared, pass/fail."""

    lemma: str
    checks: list[HypothesisCheck] = Field(default_factory=list)
    lhs: float
    rhs: float
    relation: Relation = ">="
    passed: bool
    seed: int | None = None
    book_hash: str
    details: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def conclude(
        cls,
        lemma: str,
        checks: list[HypothesisCheck],
        lhs: float,
        rhs: float,
        book: ConstantBook,
        relation: Relation = ">=",
        seed: int | None = None,
        **details: Any,
    ) -> "LemmaVerdict":
        return cls(
            lemma=lemma,
            checks=checks,
            lhs=float(lhs),
            rhs=float(rhs),
            relation=relation,
            passed=holds(lhs, relation, rhs),
            seed=seed,
            book_hash=book.digest(),
            details=details,
        )

    def summary_row(self) -> dict[str, Any]:
        """Flat row for CSV output."""
        return {
            "lemma": self.lemma,
            "passed": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "seed": self.seed,
            "checks": len(self.checks),
            "book_hash": self.book_hash[:12],
        }
