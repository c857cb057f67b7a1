"""Run manifests embedded in every output."""
import hashlib
import json
from importlib.metadata import PackageNotFoundError, version
from typing import Any

from pydantic import BaseModel, Field

from src.applemmas.constants import ConstantBook
from src.config import VERSION

PACKAGES = ("numpy", "scipy", "sympy", "pydantic", "langgraph", "typer", "loguru")


def package_versions() -> dict[str, str]:
    versions = {"rado-bounds": VERSION}
    for name in PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class RunManifest(BaseModel):
    """What produced an output: rerunning the manifest reproduces it byte for byte."""

    subcommand: str
    config: dict[str, Any] = Field(default_factory=dict)
    book_hash: str
    seed: int | None = None
    versions: dict[str, str] = Field(default_factory=package_versions)
    wall_time: float | None = None

    @classmethod
    def build(
        cls,
        subcommand: str,
        config: dict[str, Any],
        book: ConstantBook,
        seed: int | None = None,
        wall_time: float | None = None,
    ) -> "RunManifest":
        return cls(subcommand=subcommand, config=config, book_hash=book.digest(), seed=seed, wall_time=wall_time)

    def digest(self) -> str:
        """SHA-256 of the manifest without its wall time."""
        canonical = json.dumps(self.model_dump(exclude={"wall_time"}), sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode()).hexdigest()
