"""Tests for the sharpness search and the equality witnesses."""

import numpy as np
import pytest

from app.core.errors import SearchError, UnsupportedWitnessError
from app.db.models import InequalitySpec, QuadratureConfig, SearchSpec
from app.services.search_service import (
    ball_candidate,
    constant_direction_candidate,
    equality_witness,
    from_unit_box,
    lagrange_candidate,
    to_unit_box,
)

pytestmark = pytest.mark.integration

E3 = [1.0, 0.0, 0.0]


@pytest.fixture
def search_cfg():
    return QuadratureConfig(N=32)


def test_unit_box_mapping():
    lower, upper = np.array([0.1, -1.0, 2.0]), np.array([0.9, 1.0, 2.0])
    x = np.array([0.5, 0.0, 2.0])
    u = to_unit_box(x, lower, upper)
    assert np.allclose(u, [0.5, 0.5, 0.0])
    assert np.allclose(from_unit_box(u, lower, upper), x)
    assert np.allclose(from_unit_box(np.array([2.0, -1.0, 0.3]), lower, upper), [0.9, -1.0, 2.0])


def test_candidates_derive_parameters():
    """Test that each family reports the parameters it is admissible for."""
    f, derived = ball_candidate({"rho": 0.5}, 0.0, 1.0, 8)
    assert f.dim == 2
    assert derived["K"] == pytest.approx(1 / np.sqrt(0.75))
    assert (derived["m"], derived["M"]) == (0.5, 1.5)
    assert len(derived["k"]) == 9 and min(derived["k"]) >= 0

    f, derived = lagrange_candidate({"slope": -1.0}, 0.0, 1.0, 8)
    assert derived["gamma"] == pytest.approx(np.exp(-1.0))
    assert derived["Gamma"] == 1.0

    f, derived = lagrange_candidate({"amplitude": 0.5, "frequency": 2.0}, 0.0, 1.0, 8)
    assert derived["gamma"] == pytest.approx(np.exp(-1.0))
    assert derived["Gamma"] == pytest.approx(np.exp(1.0))

    f, derived = constant_direction_candidate({"rate": 1.0}, 0.0, 1.0, 8)
    assert derived["m"] == 1.0
    assert derived["M"] == pytest.approx(np.e)


def test_zero_budget_returns_midpoint(search, search_cfg):
    spec = SearchSpec(
        family="ball", free_params={"rho": (0.1, 0.9)}, inequality_id="multiplicative_ball", budget=0
    )
    result = search.maximize_relative_gap(spec, search_cfg)
    assert result.best_params == {"rho": pytest.approx(0.5)}
    assert result.evaluations == 1


def test_fixed_parameters_only(search, search_cfg):
    """Test that a search without free parameters evaluates the fixed point once."""
    spec = SearchSpec(
        family="ball", free_params={}, fixed_params={"rho": 0.3}, inequality_id="multiplicative_ball"
    )
    result = search.maximize_relative_gap(spec, search_cfg)
    assert result.best_params == {"rho": 0.3}
    assert result.evaluations == 1
    assert result.report.id == "multiplicative_ball"


def test_ball_search_moves_to_widest_radius(search, search_cfg):
    """Test that the relative gap of the ball reverse grows with rho, so the search ends at 0.9."""
    spec = SearchSpec(
        family="ball", free_params={"rho": (0.1, 0.9)}, inequality_id="multiplicative_ball", budget=60, restarts=3
    )
    result = search.maximize_relative_gap(spec, search_cfg)
    assert result.best_params["rho"] == pytest.approx(0.9, abs=0.8 / 64)
    assert result.best_rel_gap == result.report.rel_gap
    assert result.evaluations <= spec.budget + 1
    assert "not a sharpness certificate" in result.label


def test_ball_search_gap_oracle(inequalities, search_cfg):
    """Test the scan that the search relies on: rel_gap increases with rho."""
    gaps = []
    for rho in np.linspace(0.1, 0.9, 9):
        f, derived = ball_candidate({"rho": float(rho)}, 0.0, 1.0, search_cfg.N)
        spec = InequalitySpec(id="multiplicative_ball", rho=float(rho), e=derived["e"])
        gaps.append(inequalities.evaluate(f, spec, search_cfg)[0].rel_gap)
    assert gaps == sorted(gaps)


def test_search_is_deterministic(search, search_cfg):
    spec = SearchSpec(
        family="lagrange", free_params={"slope": (-1.0, 1.0)}, inequality_id="weighted_gamma",
        budget=30, seed=7, restarts=4,
    )
    first = search.maximize_relative_gap(spec, search_cfg)
    second = search.maximize_relative_gap(spec, search_cfg)
    assert first.model_dump() == second.model_dump()


def test_search_without_admissible_candidate(search, search_cfg):
    """Test that a family that never meets the ball condition raises SearchError."""
    spec = SearchSpec(
        family="constant-direction", free_params={"rate": (1.0, 2.0)}, fixed_params={"rho": 0.1},
        inequality_id="multiplicative_ball", budget=10, restarts=2,
    )
    with pytest.raises(SearchError):
        search.maximize_relative_gap(spec, search_cfg)


def test_search_spec_validation():
    with pytest.raises(ValueError):
        SearchSpec(family="ball", free_params={"rho": (0.9, 0.1)}, inequality_id="multiplicative_ball")
    with pytest.raises(ValueError):
        SearchSpec(family="ball", free_params={}, inequality_id="multiplicative_ball", budget=-1)


@pytest.mark.parametrize(
    "inequality_id,params,spec_params",
    [
        ("multiplicative_K", {"K": 1.0}, {"K": 1.0, "e": [1.0]}),
        ("multiplicative_ball", {"rho": 0.5}, {"rho": 0.5, "e": E3}),
        ("multiplicative_mM", {"m": 1.0, "M": 4.0}, {"m": 1.0, "M": 4.0, "e": E3}),
        ("quadratic_mM", {"m": 1.0, "M": 1.0}, {"m": 1.0, "M": 1.0}),
        ("quadratic_ratio", {"m": 1.0, "M": 1.0}, {"m": 1.0, "M": 1.0}),
        ("weighted_gamma", {"gamma": 1.0, "Gamma": 2.0}, {"gamma": 1.0, "Gamma": 2.0}),
    ],
)
def test_equality_witnesses(inequalities, inequality_id, params, spec_params):
    """Test that each witness attains equality: rel_gap and residual vanish."""
    cfg = QuadratureConfig(N=64)
    f = equality_witness(inequality_id, params, 0.0, 1.0, cfg.N)
    [report] = inequalities.evaluate(f, InequalitySpec(id=inequality_id, **spec_params), cfg)
    assert report.satisfied
    assert abs(report.rel_gap) <= 1e-9
    assert report.equality_residual <= 1e-9


def test_triangle_witness(inequalities):
    cfg = QuadratureConfig(N=16)
    f = equality_witness("triangle", {"rate": 2.0}, 0.0, 1.0, cfg.N)
    assert abs(inequalities.eval_triangle(f, cfg).rel_gap) <= 1e-12


def test_additive_k_witness(inequalities):
    """Test k(t) = ||f(t)|| - Re<f(t), e> on a ball family: equality and a saturated condition."""
    cfg = QuadratureConfig(N=64)
    f = equality_witness("additive_k", {"rho": 0.5}, 0.0, 1.0, cfg.N)
    k = f.norms() - f.values[:, 0].real
    report = inequalities.eval_additive_reverse(f, [1.0, 0.0], cfg, k=k)
    assert report.hypothesis.holds
    assert report.hypothesis.worst_margin == pytest.approx(0.0, abs=1e-15)
    assert report.rhs == pytest.approx(report.lhs, abs=1e-9)
    assert report.equality_residual <= 1e-9


@pytest.mark.parametrize(
    "inequality_id,params",
    [
        ("multiplicative_K", {"K": 2.0}),
        ("quadratic_mM", {"m": 1.0, "M": 2.0}),
        ("weighted_gamma", {"gamma": 0.5, "Gamma": 2.0}),
        ("karamata", {"theta": 0.5}),
        ("complex_suite", {}),
    ],
)
def test_unsupported_witnesses(inequality_id, params):
    with pytest.raises(UnsupportedWitnessError):
        equality_witness(inequality_id, params, 0.0, 1.0, 8)
