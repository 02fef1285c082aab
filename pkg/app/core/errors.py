"""Exception hierarchy for the inequality toolkit."""

from typing import Any, Optional


class InequalityToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class InputError(InequalityToolkitError):
    """Malformed input: dimension mismatch, non-finite values, bad grid or parameters."""


class HypothesisConstructionError(InputError):
    """A family constructor could not guarantee its admissibility condition."""


class HypothesisUnmetError(InequalityToolkitError):
    """An evaluator's precondition failed on the grid.

    The inequality claims nothing in this case, so this is not a violation.
    """

    def __init__(self, inequality_id: str, report: Any):
        self.inequality_id = inequality_id
        self.report = report
        super().__init__(
            f"{inequality_id}: hypothesis unmet "
            f"(worst margin {report.worst_margin:.3e} at {report.worst_location})"
        )


class SearchError(InequalityToolkitError):
    """The sharpness search found no admissible candidate."""


class UnsupportedWitnessError(InequalityToolkitError):
    """No constructive equality witness is known for the requested inequality."""


class ScenarioError(InequalityToolkitError):
    """Scenario file could not be read or validated."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.message = message
        self.location = location
        prefix = f"{location}: " if location else ""
        super().__init__(f"{prefix}{message}")
