"""Report serialization: JSON documents and fixed-column CSV rows."""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "id",
    "lhs",
    "rhs",
    "abs_gap",
    "rel_gap",
    "satisfied",
    "equality_residual",
    "hypothesis_holds",
    "worst_margin",
]


def format_float(value: Optional[float]) -> str:
    """17 significant digits; empty for missing values."""
    if value is None:
        return ""
    if not math.isfinite(value):
        raise ValueError(f"Refusing to serialize non-finite value {value}")
    return f"{value:.17g}"


def to_json(document: Dict[str, Any]) -> str:
    """Deterministic JSON; floats use the shortest repr that round-trips exactly."""
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def csv_row(entry: Dict[str, Any], prefix: Sequence[Any] = ()) -> List[str]:
    """One CSV row from a report entry (evaluated or hypothesis-unmet)."""
    hypothesis = entry.get("hypothesis") or {}
    cells = [str(p) if not isinstance(p, float) else format_float(p) for p in prefix]
    cells.append(entry["id"])
    for column in ("lhs", "rhs", "abs_gap", "rel_gap"):
        cells.append(format_float(entry.get(column)))
    satisfied = entry.get("satisfied")
    cells.append("" if satisfied is None else str(bool(satisfied)).lower())
    cells.append(format_float(entry.get("equality_residual")))
    holds = hypothesis.get("holds")
    cells.append("" if holds is None else str(bool(holds)).lower())
    cells.append(format_float(hypothesis.get("worst_margin")))
    return cells


def to_csv(rows: Iterable[List[str]], header: Sequence[str] = CSV_COLUMNS) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def write_output(text: str, path: Optional[str]) -> None:
    """Write to path, or to stdout when path is None."""
    if path is None:
        print(text, end="")
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info(f"Wrote report to {target}")
