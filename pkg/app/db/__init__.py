from app.db.models import (
    FunctionSpec,
    HypothesisReport,
    HypothesisSpec,
    InequalityReport,
    InequalitySpec,
    QuadratureConfig,
    Scenario,
    SearchResult,
    SearchSpec,
)
