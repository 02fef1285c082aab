"""Tests for grid functions and the admissible family constructors."""

import math

import numpy as np
import pytest

from app.core.errors import HypothesisConstructionError, InputError
from app.core.functions import (
    GridFunction,
    make_ball_family,
    make_constant_direction,
    make_lagrange_family,
    node_values,
    pairwise_ratio_bounds,
    sample,
)
from app.core.vectors import ComplexVector
from app.db.models import BallFamilySpec, FunctionSpec, HypothesisSpec, LagrangeFamilySpec, ScalarProfile
from app.tests.test_utils import E1, U2

pytestmark = pytest.mark.unit


def test_sample_constant():
    """Test that a constant function repeats e at every node."""
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 4)
    assert f.N == 4
    assert f.values.shape == (5, 2)
    assert np.all(f.values == np.array([1.0, 0.0]))


def test_sample_linear_polynomial():
    """Test f(t) = t e on [0, 1] with N = 2."""
    f = sample(FunctionSpec(kind="polynomial", coefficients=[[0.0, 0.0], E1]), 0.0, 1.0, 2)
    assert np.allclose(f.values[:, 0], [0.0, 0.5, 1.0])
    assert np.all(f.values[:, 1] == 0)


def test_sample_circle():
    """Test (cos t, sin t) on [0, pi/2] with N = 2."""
    f = sample(FunctionSpec(kind="circle"), 0.0, math.pi / 2, 2)
    half = math.sqrt(2) / 2
    expected = np.array([[1.0, 0.0], [half, half], [0.0, 1.0]])
    assert np.allclose(f.values, expected, atol=1e-15)
    assert np.allclose(f.norms(), 1.0)


def test_sample_callable_and_phase():
    """Test that a plain callable and the phase descriptor give the same values."""
    from_callable = sample(lambda t: [np.exp(1j * t)], -1.0, 1.0, 8)
    from_spec = sample(FunctionSpec(kind="phase"), -1.0, 1.0, 8)
    assert np.allclose(from_callable.values, from_spec.values)
    assert from_spec.dim == 1


def test_sign_switch_vanishes_at_midpoint():
    f = sample(FunctionSpec(kind="sign_switch", vector=E1), 0.0, 1.0, 4)
    assert np.allclose(f.values[:, 0], [1, 1, 0, -1, -1])


def test_grid_validation():
    """Test odd grids, empty intervals and non-finite samples."""
    spec = FunctionSpec(kind="constant", vector=E1)
    with pytest.raises(InputError):
        sample(spec, 0.0, 1.0, 3)
    with pytest.raises(InputError):
        sample(spec, 1.0, 1.0, 4)
    with pytest.raises(InputError):
        sample(spec, 0.0, math.inf, 4)
    with pytest.raises(InputError):
        sample(lambda t: [1.0 / t if t else math.nan], 0.0, 1.0, 2)
    with pytest.raises(InputError):
        sample(FunctionSpec(kind="polynomial", coefficients=[E1, [1.0]]), 0.0, 1.0, 2)


def test_grid_function_is_read_only():
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 2)
    with pytest.raises(ValueError):
        f.values[0, 0] = 2.0
    assert f.value(1) == ComplexVector(E1)
    assert f.scaled(2j).values[0, 0] == 2j


def test_node_values_explicit_list():
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 2)
    assert np.allclose(node_values([0.1, 0.2, 0.3], f), [0.1, 0.2, 0.3])
    with pytest.raises(InputError):
        node_values([0.1, 0.2], f)
    assert np.allclose(node_values(ScalarProfile(kind="constant", value=0.6), f), 0.6)


def test_lagrange_zero_psi():
    """Test psi = 0: phi = 1 and gamma = Gamma = 1."""
    spec = LagrangeFamilySpec(psi=ScalarProfile(kind="zero"), theta=0.0, Theta=0.0, a=0.0, b=1.0)
    f, gamma, Gamma = make_lagrange_family(spec, 16)
    assert np.all(f.values == 1.0)
    assert gamma == Gamma == 1.0


def test_lagrange_exponential_decay():
    """Test psi(u) = u on [0, 1]: phi = exp(-t), gamma = 1, Gamma = e."""
    spec = LagrangeFamilySpec(
        psi=ScalarProfile(kind="linear", coefficients=[0.0, 1.0]), theta=0.0, Theta=1.0, a=0.0, b=1.0
    )
    f, gamma, Gamma = make_lagrange_family(spec, 16)
    assert np.allclose(f.values[:, 0].real, np.exp(-f.nodes), rtol=1e-14)
    assert gamma == 1.0
    assert Gamma == pytest.approx(math.e, rel=1e-15)


def test_lagrange_sine_satisfies_pairwise_condition(hypotheses):
    """Test psi = sin on [0, pi]: gamma = exp(-pi) and the pairwise condition holds at every node pair."""
    spec = LagrangeFamilySpec(psi=ScalarProfile(kind="sine"), theta=-1.0, Theta=1.0, a=0.0, b=math.pi)
    f, gamma, Gamma = make_lagrange_family(spec, 64)
    assert gamma == pytest.approx(math.exp(-math.pi))
    assert Gamma == pytest.approx(math.exp(math.pi))
    report = hypotheses.check(f, HypothesisSpec(kind="pairwise-gammaGamma", gamma=gamma, Gamma=Gamma))
    assert report.holds
    assert report.checked == 65 * 66 // 2


def test_lagrange_rejects_steep_psi():
    """Test that psi' outside [theta, Theta] is a construction error."""
    spec = LagrangeFamilySpec(
        psi=ScalarProfile(kind="linear", coefficients=[0.0, 2.0]), theta=0.0, Theta=1.0, a=0.0, b=1.0
    )
    with pytest.raises(HypothesisConstructionError):
        make_lagrange_family(spec, 16)


def test_lagrange_spec_rejects_unknown_psi():
    with pytest.raises(ValueError):
        LagrangeFamilySpec(psi=ScalarProfile(kind="exponential"), theta=0.0, Theta=1.0, a=0.0, b=1.0)


def test_ball_family_constant_modulation():
    """Test modulation 0: f is identically e."""
    spec = BallFamilySpec(e=E1, u=U2, rho=0.5, modulation=ScalarProfile(kind="zero"))
    f = make_ball_family(spec, 0.0, 1.0, 8)
    assert np.all(f.values == np.array([1.0, 0.0]))


def test_ball_family_cosine_modulation(hypotheses):
    """Test rho = 0.6 with cos t on [0, pi]: max distance 0.6, and the ball check passes."""
    spec = BallFamilySpec(e=E1, u=U2, rho=0.6, modulation=ScalarProfile(kind="cosine"))
    f = make_ball_family(spec, 0.0, math.pi, 64)
    distance = np.sqrt(np.sum(np.abs(f.values - np.array([1.0, 0.0])) ** 2, axis=1))
    assert np.max(distance) == pytest.approx(0.6, abs=1e-15)
    assert hypotheses.check(f, HypothesisSpec(kind="ball-rho", rho=0.6, e=E1)).holds


def test_ball_family_construction_errors():
    """Test non-orthogonal directions, non-unit vectors and oversized modulation."""
    cosine = ScalarProfile(kind="cosine")
    with pytest.raises(HypothesisConstructionError):
        make_ball_family(BallFamilySpec(e=E1, u=[0.6, 0.8], rho=0.5, modulation=cosine), 0.0, 1.0, 4)
    with pytest.raises(HypothesisConstructionError):
        make_ball_family(BallFamilySpec(e=[2.0, 0.0], u=U2, rho=0.5, modulation=cosine), 0.0, 1.0, 4)
    with pytest.raises(HypothesisConstructionError):
        make_ball_family(BallFamilySpec(e=E1, u=[0.0], rho=0.5, modulation=cosine), 0.0, 1.0, 4)
    big = ScalarProfile(kind="cosine", amplitude=2.0)
    with pytest.raises(HypothesisConstructionError):
        make_ball_family(BallFamilySpec(e=E1, u=U2, rho=0.5, modulation=big), 0.0, 1.0, 4)


def test_ball_family_accepts_imaginary_direction():
    """Test u = i e, which is orthogonal to e in the real sense only."""
    spec = BallFamilySpec(e=[1.0], u=[[0.0, 1.0]], rho=0.3, modulation=ScalarProfile(kind="constant", value=1.0))
    f = make_ball_family(spec, 0.0, 1.0, 4)
    assert np.allclose(f.values[:, 0], 1.0 + 0.3j)


def test_constant_direction_and_ratio_bounds():
    """Test exp(-t) e on [0, 1]: ratios phi(t)/phi(s), t <= s, span [1, e]."""
    profile = ScalarProfile(kind="exponential", rate=-1.0)
    f = make_constant_direction(profile, ComplexVector([1.0]), 0.0, 1.0, 32)
    m, M = pairwise_ratio_bounds(f)
    assert m == 1.0
    assert M == pytest.approx(math.e, rel=1e-14)


def test_ratio_bounds_need_positive_values():
    f = GridFunction(0.0, 1.0, np.array([1.0, 0.0, -1.0]))
    with pytest.raises(InputError):
        pairwise_ratio_bounds(f)
