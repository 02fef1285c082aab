"""
Loader for scenario files.
Reads strict JSON, fills interval defaults into the family and validates
against the versioned schema.
"""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Tuple, Union

from pydantic import ValidationError

from app.core.errors import ScenarioError
from app.db.models import Scenario

logger = logging.getLogger(__name__)


def _reject_constant(name: str) -> None:
    raise ValueError(f"non-finite number {name} is not valid JSON")


def parse_json(text: str, location: str = "<scenario>") -> Dict[str, Any]:
    """Parse scenario text; NaN and Infinity literals are rejected."""
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"malformed JSON: {e.msg} (line {e.lineno}, column {e.colno})", location)
    except ValueError as e:
        raise ScenarioError(str(e), location)
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object", location)
    return raw


def read_raw(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ScenarioError(f"cannot read scenario: {e}", str(path))
    return parse_json(text, str(path))


def _inject_interval(raw: Dict[str, Any]) -> Dict[str, Any]:
    family = raw.get("family")
    interval = raw.get("interval")
    if isinstance(family, dict) and isinstance(interval, dict) and family.get("family") == "lagrange":
        family.setdefault("a", interval.get("a"))
        family.setdefault("b", interval.get("b"))
    return raw


def validate(raw: Dict[str, Any], location: str = "<scenario>") -> Scenario:
    """Validate a raw scenario dict, reporting the first failing field."""
    raw = _inject_interval(copy.deepcopy(raw))
    try:
        return Scenario.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"])
        raise ScenarioError(f"{field}: {first['msg']} ({e.error_count()} error(s))", location)


def load_scenario(path: Union[str, Path]) -> Tuple[Dict[str, Any], Scenario]:
    """Read and validate a scenario file.

    Returns:
        The raw JSON object (used for sweeps) and the validated Scenario
    """
    raw = read_raw(path)
    scenario = validate(raw, str(path))
    logger.info(f"Loaded scenario {scenario.name or path} from {path}")
    return raw, scenario


def set_path(raw: Dict[str, Any], dotted: str, value: Any) -> Dict[str, Any]:
    """Return a copy of raw with the value at a dotted path replaced.

    Integer segments index lists, e.g. "inequalities.0.rho".
    """
    out = copy.deepcopy(raw)
    parts = dotted.split(".")
    node: Any = out
    try:
        for part in parts[:-1]:
            node = node[int(part)] if isinstance(node, list) else node[part]
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        elif isinstance(node, dict):
            node[last] = value
        else:
            raise TypeError(f"cannot set {last} on {type(node).__name__}")
    except (KeyError, IndexError, ValueError, TypeError) as e:
        raise ScenarioError(f"sweep target {dotted!r} does not resolve: {e}")
    return out
