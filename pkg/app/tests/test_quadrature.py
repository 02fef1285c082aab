"""Tests for Bochner integrals and triangle quadrature."""

import math

import numpy as np
import pytest

from app.core.errors import InputError
from app.core.functions import sample
from app.core.quadrature import (
    bochner_integral,
    integral_norm,
    kernel_matrix,
    quadratic_identity_residual,
    quadrature_weights,
    triangle_inner_integral,
    triangle_integral,
    triangle_norm_integral,
    weighted_norm_integral,
)
from app.core.vectors import norm
from app.db.models import FunctionSpec, KernelSpec, QuadratureConfig, ScalarProfile
from app.tests.test_utils import E1, random_catalog_function

pytestmark = pytest.mark.unit


def _circle(b, N):
    return sample(FunctionSpec(kind="circle"), 0.0, b, N)


def test_weights_sum_to_length():
    """Test both rules integrate constants exactly."""
    for rule in ("simpson", "trapezoid"):
        w = quadrature_weights(rule, 10, 0.3)
        assert w.sum() == pytest.approx(3.0, rel=1e-15)
    with pytest.raises(InputError):
        quadrature_weights("simpson", 5, 0.1)
    with pytest.raises(InputError):
        quadrature_weights("midpoint", 4, 0.1)


def test_grid_must_match_config():
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 8)
    with pytest.raises(InputError):
        bochner_integral(f, QuadratureConfig(N=16))


def test_bochner_integral_constant():
    """Test f = e on [0, 2] integrates to 2e."""
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 2.0, 16)
    integral = bochner_integral(f, QuadratureConfig(N=16))
    assert np.allclose(integral.coords, [2.0, 0.0], rtol=1e-15, atol=0)
    assert integral_norm(f, QuadratureConfig(N=16)) == pytest.approx(2.0, rel=1e-15)


def test_bochner_integral_linear():
    """Test f(t) = t e on [0, 1] integrates to e / 2."""
    f = sample(FunctionSpec(kind="polynomial", coefficients=[[0.0, 0.0], E1]), 0.0, 1.0, 4)
    cfg = QuadratureConfig(N=4)
    assert np.allclose(bochner_integral(f, cfg).coords, [0.5, 0.0], rtol=1e-15)
    assert integral_norm(f, cfg) == pytest.approx(0.5, rel=1e-15)


def test_bochner_integral_circle():
    """Test the quarter circle integrates to (1, 1) and has length pi/2."""
    f = _circle(math.pi / 2, 64)
    cfg = QuadratureConfig(N=64)
    assert np.allclose(bochner_integral(f, cfg).coords, [1.0, 1.0], atol=1e-8, rtol=0)
    assert integral_norm(f, cfg) == pytest.approx(math.pi / 2, rel=1e-14)


def test_simpson_convergence_order():
    """Test that doubling N cuts the quarter-circle error by at least 12."""
    errors = []
    for N in (128, 256):
        integral = bochner_integral(_circle(math.pi / 2, N), QuadratureConfig(N=N))
        errors.append(float(np.max(np.abs(integral.coords - 1.0))))
    assert errors[1] > 0
    assert errors[0] / errors[1] >= 12


def test_triangle_integral_constant_kernel():
    """Test k = 1 over the triangle of [0, 1] gives its area 1/2 for both pair rules."""
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 16)
    for pair_rule in ("simpson", "trapezoid"):
        cfg = QuadratureConfig(N=16, pair_rule=pair_rule)
        assert triangle_integral(lambda t, s: np.ones_like(t), f, cfg) == pytest.approx(0.5, rel=1e-14)


def test_triangle_integral_linear_kernel(cfg):
    """Test k = s - t: the symmetric Simpson rule gives 1/6 - h^2/9 exactly."""
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, cfg.N)
    value = triangle_integral(lambda t, s: s - t, f, cfg)
    h = 1.0 / cfg.N
    assert value == pytest.approx(1 / 6 - h * h / 9, abs=1e-12)
    assert value == pytest.approx(1 / 6, abs=1e-5)


def test_triangle_integral_cos_difference(cfg):
    """Test k = 1 - cos(s - t) on [0, pi/2] gives pi^2/8 - 1."""
    f = _circle(math.pi / 2, cfg.N)
    expected = math.pi ** 2 / 8 - 1
    from_callable = triangle_integral(lambda t, s: 1 - np.cos(s - t), f, cfg)
    from_catalog = triangle_integral(kernel_matrix(KernelSpec(kind="cos_difference"), f), f, cfg)
    assert from_callable == pytest.approx(expected, abs=1e-8)
    assert from_catalog == from_callable


def test_triangle_integral_ignores_lower_half():
    """Test that values below the diagonal do not contribute."""
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 8)
    cfg = QuadratureConfig(N=8)
    K = np.ones((9, 9))
    K[np.tril_indices(9, -1)] = np.nan
    assert triangle_integral(K, f, cfg) == pytest.approx(0.5, rel=1e-14)


def test_kernel_errors():
    f = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 4)
    cfg = QuadratureConfig(N=4)
    with pytest.raises(InputError):
        triangle_integral(np.ones((4, 4)), f, cfg)
    K = np.ones((5, 5))
    K[0, 4] = np.inf
    with pytest.raises(InputError):
        triangle_integral(K, f, cfg)
    with pytest.raises(InputError):
        triangle_norm_integral(f, cfg, variable="u")


def test_weighted_norm_integral():
    """Test the weighted examples: weight s - a with f = e, weight s with f = s e."""
    cfg = QuadratureConfig(N=8)
    constant = sample(FunctionSpec(kind="constant", vector=E1), 0.0, 1.0, 8)
    assert weighted_norm_integral(constant, lambda s: s, cfg) == pytest.approx(0.5, rel=1e-14)
    linear = sample(FunctionSpec(kind="polynomial", coefficients=[[0.0, 0.0], E1]), 0.0, 1.0, 8)
    weight = ScalarProfile(kind="linear", coefficients=[0.0, 1.0])
    assert weighted_norm_integral(linear, weight, cfg) == pytest.approx(0.25, rel=1e-14)


def test_weighted_norm_integral_constant_weight(rng, cfg):
    """Test gamma*Gamma = 1: the weight is b - a and the integral is (b - a) times the integral of ||f||^2."""
    f = random_catalog_function(rng, 2, a=0.0, b=2.0, N=cfg.N)
    weight = (2.0 - f.nodes) + 1.0 * (f.nodes - 0.0)
    expected = 2.0 * weighted_norm_integral(f, np.ones(cfg.N + 1), cfg)
    assert weighted_norm_integral(f, weight, cfg) == pytest.approx(expected, rel=1e-13)
    with pytest.raises(InputError):
        weighted_norm_integral(f, np.ones(3), cfg)


def test_quadratic_identity_and_inner_integral(rng, cfg):
    """Test the Schwarz-gap identity and that the Re<f(t), f(s)> double integral is half of ||int f||^2."""
    for dim in (1, 2, 3):
        f = random_catalog_function(rng, dim, N=cfg.N)
        total = integral_norm(f, cfg)
        assert abs(quadratic_identity_residual(f, cfg)) <= 1e-10 * max(1.0, total ** 2)
        half = 0.5 * norm(bochner_integral(f, cfg)) ** 2
        assert triangle_inner_integral(f, cfg) == pytest.approx(half, rel=1e-10, abs=1e-12 * max(1.0, total ** 2))


def test_triangle_norm_integral_by_parts(rng, cfg):
    """Test the triangle integrals of ||f(t)||^2 and ||f(s)||^2 against the (b - s) and (s - a) moments.

    On the grid they differ from the moments by exactly (h^2/18)(g(b) - g(a)), g = ||f||^2.
    """
    f = random_catalog_function(rng, 2, a=0.5, b=1.5, N=cfg.N)
    g = f.norms() ** 2
    correction = f.h ** 2 / 18 * (g[-1] - g[0])
    t_moment = weighted_norm_integral(f, 1.5 - f.nodes, cfg)
    s_moment = weighted_norm_integral(f, f.nodes - 0.5, cfg)
    scale = max(1.0, t_moment, s_moment)
    assert triangle_norm_integral(f, cfg, "t") == pytest.approx(t_moment + correction, abs=1e-12 * scale)
    assert triangle_norm_integral(f, cfg, "s") == pytest.approx(s_moment - correction, abs=1e-12 * scale)


def test_triangle_norm_integral_periodic_norm(cfg):
    """Test that the by-parts identity is exact up to rounding when ||f(a)|| = ||f(b)||."""
    f = sample(FunctionSpec(kind="circle", amplitude=2.0), 0.0, 1.0, cfg.N)
    s_moment = weighted_norm_integral(f, f.nodes, cfg)
    assert triangle_norm_integral(f, cfg, "s") == pytest.approx(s_moment, rel=1e-6)
    assert s_moment == pytest.approx(2.0, rel=1e-12)
