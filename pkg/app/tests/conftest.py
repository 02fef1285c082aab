"""Configuration for pytest."""

import numpy as np
import pytest

from app.db.models import QuadratureConfig
from app.services.hypothesis_service import HypothesisService
from app.services.inequality_service import InequalityService
from app.services.main_service import MainService
from app.services.scenario_service import ScenarioService
from app.services.search_service import SearchService
from app.tests.test_utils import TEST_N, write_scenario


@pytest.fixture
def cfg():
    """Composite Simpson on the default test grid."""
    return QuadratureConfig(rule="simpson", N=TEST_N)


@pytest.fixture
def coarse_cfg():
    """A small grid for pairwise checks that are quadratic in N."""
    return QuadratureConfig(rule="simpson", N=64)


@pytest.fixture
def rng():
    """Seeded generator so the property tests are reproducible."""
    return np.random.default_rng(12345)


@pytest.fixture
def main_service():
    return MainService(show_progress=False)


@pytest.fixture
def hypotheses(main_service) -> HypothesisService:
    return main_service.hypothesis_service


@pytest.fixture
def inequalities(main_service) -> InequalityService:
    return main_service.inequality_service


@pytest.fixture
def search(main_service) -> SearchService:
    return main_service.search_service


@pytest.fixture
def scenario_service(main_service) -> ScenarioService:
    return main_service.scenario_service


@pytest.fixture
def base_scenario():
    """
    A minimal valid scenario: the unit circle in C^2 through the triangle inequality.

    Tests copy and modify it rather than writing scenarios from scratch.
    """
    return {
        "schema_version": 1,
        "name": "circle",
        "interval": {"a": 0.0, "b": 1.0},
        "grid": {"N": 64, "rule": "simpson"},
        "family": {"family": "function", "kind": "circle", "frequency": 1.0},
        "inequalities": [{"id": "triangle"}],
    }


@pytest.fixture
def scenario_file(tmp_path):
    """
    Factory fixture that writes a scenario to a temporary JSON file.

    Accepts a dict (serialized as JSON) or raw text, so malformed files can
    be produced too.
    """
    def _write(scenario, name="scenario.json"):
        return write_scenario(tmp_path, name, scenario)

    return _write
