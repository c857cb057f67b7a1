"""JSON persistence and result emitters."""
import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable

from loguru import logger

from src.config import OUTPUT_DIR
from src.equation.rado_criterion import IntervalColouring
from src.errors import InputError
from src.harmonics.groups import GroupSubset


def _ensure_directory(path: Path) -> None:
    """Create the parent directory of an output file if it doesn't exist."""
    path.parent.mkdir(parents=True, exist_ok=True)


def output_path(name: str) -> Path:
    """Resolve a bare file name under OUTPUT_DIR; paths with a directory are kept as given."""
    path = Path(name)
    return path if path.parent != Path(".") else OUTPUT_DIR / path


def load_json(path: str | Path) -> Any:
    """
    Read a JSON document.

    Raises:
        InputError: if the file is missing or is not valid JSON
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"file not found: {path}")
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def save_json(payload: Any, path: str | Path) -> Path:
    """Write a JSON document with sorted keys so reruns produce identical bytes."""
    path = Path(path)
    _ensure_directory(path)
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
    logger.info(f"Saved {path}")
    return path


def load_colouring(path: str | Path) -> IntervalColouring:
    """
    Load a colouring of [N] or {-N..N}.

    Accepts {"n", "signed", "classes"} or {"labels", "signed"} where labels
    gives one colour per element of the domain in increasing order. The
    output of `rado witness` is accepted as is.
    """
    payload = load_json(path)
    if isinstance(payload, dict) and "manifest" in payload:
        payload = payload.get("result") or {}
    try:
        if "labels" in payload:
            return IntervalColouring.from_labels(payload["labels"], signed=payload.get("signed", False))
        return IntervalColouring.model_validate(payload)
    except (ValueError, TypeError) as e:
        raise InputError(f"{path} does not hold a colouring: {e}") from e


def save_colouring(colouring: IntervalColouring, path: str | Path) -> Path:
    return save_json(colouring.model_dump(), path)


def load_subset(path: str | Path) -> GroupSubset:
    """Load {"group": "zp:101", "members": [...]}."""
    payload = load_json(path)
    try:
        return GroupSubset.from_json(payload)
    except (KeyError, ValueError) as e:
        raise InputError(f"{path} does not hold a group subset: {e}") from e


def save_subset(subset: GroupSubset, path: str | Path) -> Path:
    return save_json(subset.to_json(), path)


def to_ndjson(records: Iterable[Any]) -> str:
    """One canonical JSON document per line."""
    return "\n".join(json.dumps(record, sort_keys=True, default=str) for record in records)


def to_csv(rows: list[dict[str, Any]]) -> str:
    """CSV with the union of row keys as header, in first-seen order."""
    fields: list[str] = []
    for row in rows:
        fields.extend(key for key in row if key not in fields)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()
