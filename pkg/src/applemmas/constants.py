"""Absolute constants used by the lemma engines, with their derived relations."""
import hashlib
import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, computed_field

from src.config import RETRY_BUDGET
from src.errors import InputError


class ConstantBook(BaseModel):
    """
    Named constants for every engine.

    Defaults are chosen so each engine's hypotheses imply those of the
    engines it calls (C_spec, C_spec2, C_spec3, C_L, C_pd, C_llc, C_rdc);
    the unpinned ones (C_lcb, C_mzi, C_csl) default to 1 and only feed
    telemetry. Derived constants are computed from the base ones and are
    never set directly.

    The defaults give astronomically large k, l, m; desk-scale runs use
    ConstantBook.desk() or a book file.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    growth: float = Field(default=100.0, gt=0, description="Bohr growth base: |B(2d)| <= growth^d |B(d)|")
    c32: float = Field(default=1 / 32, gt=0, description="density gain of one increment step")
    c16: float = Field(default=1 / 16, gt=0)
    c8: float = Field(default=1 / 8, gt=0, description="width factor of the pipeline's output Bohr set")
    C12: float = Field(default=12.0, gt=0, description="rigidity constant of the local Chang lemma")
    C_specpos: float = Field(default=12.0, gt=0, description="error constant of spectral positivity")
    C_rdc: float = Field(default=3.25, gt=0, description="sifting: k >= C_rdc eps^-1 log(2/kappa)")
    C_llc: float = Field(default=8.0, gt=0, description="local Chang: k >= C_llc eps^-2 log(2/alpha)")
    C_lcb: float = Field(default=1.0, gt=0, description="dissociated-set size bound")
    C_mzi: float = Field(default=1.0, gt=0, description="moment inequality constant in the sampling size")
    C_csl: float = Field(default=1.0, gt=0, description="almost-period density exponent")
    C_spec: float = Field(default=78.0, gt=0, description="iteration lemma: k >= C_spec log(2/delta)")
    C_spec2: float = Field(default=9_625_600.0, gt=0, description="iteration lemma: m >= C_spec2 l^2 k^2 log^2(2/alpha)")
    C_spec3: float = Field(default=40.0, gt=0, description="iteration lemma: l >= C_spec3 k log(2/alpha)")
    C_L: float = Field(default=8.0, gt=0, description="pipeline: l >= C_L log(2/(sigma eps))")
    C_pd: float = Field(default=376.0, gt=0, description="pipeline: m >= C_pd eps^-2 l^2 log(2/tau) log(2/sigma)")
    retry_budget: int = Field(default=RETRY_BUDGET, ge=1)

    @computed_field
    @property
    def c_me(self) -> float:
        return 1.0 / (8.0 * self.C_specpos)

    @computed_field
    @property
    def c962(self) -> float:
        return 1.0 / (8.0 * self.C12)

    @computed_field
    @property
    def c96(self) -> float:
        return self.c962 / 32.0

    @computed_field
    @property
    def c128(self) -> float:
        return self.c8 / 32.0

    def base_values(self) -> dict:
        return self.model_dump(exclude={"c_me", "c962", "c96", "c128"})

    def canonical_json(self) -> str:
        return json.dumps(self.base_values(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """SHA-256 of the canonical JSON of the base constants."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    @classmethod
    def load(cls, path: str | Path | None) -> "ConstantBook":
        """Load a book from JSON; None gives the defaults."""
        if path is None:
            return cls()
        path = Path(path)
        if not path.exists():
            raise InputError(f"constant book not found: {path}")
        try:
            payload = json.loads(path.read_text())
            return cls(**{k: v for k, v in payload.items() if k not in {"c_me", "c962", "c96", "c128"}})
        except (json.JSONDecodeError, ValueError) as e:
            raise InputError(f"invalid constant book {path}: {e}") from e

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.model_dump(), indent=2, sort_keys=True))
        return path

    @classmethod
    def desk(cls) -> "ConstantBook":
        """
        A tuned-down book whose k, l, m stay small on groups of a few thousand elements.

        c8 is raised so the pipeline's output width c8 eps sigma / m reaches
        the nearest nonzero points of a Bohr set in Z/pZ for p around 100.
        """
        return cls(
            c8=8.0, C_rdc=0.05, C_llc=0.5, C_spec=1.0, C_spec2=0.001, C_spec3=0.5, C_L=0.5, C_pd=0.0001,
        )

    def with_overrides(self, **overrides) -> "ConstantBook":
        """A copy with the given base constants replaced."""
        try:
            return ConstantBook(**{**self.base_values(), **overrides})
        except ValueError as e:
            raise InputError(f"invalid constant override: {e}") from e


DEFAULT_BOOK = ConstantBook()
