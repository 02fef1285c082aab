"""
Vector-valued functions on [a, b] sampled on uniform grids, and the
constructive families that satisfy the pairwise and ball conditions by
construction.

Conditions stated "for almost every t" are checked at every grid node
(or node pair), which is a strictly stronger reading.
"""

import logging
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from app.core.errors import HypothesisConstructionError, InputError
from app.core.vectors import ComplexVector, is_unit, re_inner
from app.db.models import (
    BallFamilySpec,
    FunctionSpec,
    LagrangeFamilySpec,
    NodeProfile,
    ScalarProfile,
)

logger = logging.getLogger(__name__)

# psi' is validated on a grid this many times finer than the sampling grid
DERIVATIVE_REFINEMENT = 8
DERIVATIVE_TOLERANCE = 1e-12

Evaluator = Union[FunctionSpec, Callable[[float], Sequence[complex]]]


class GridFunction:
    """Node values of f: [a, b] -> C^dim on N + 1 uniform nodes (N even)."""

    __slots__ = ("a", "b", "N", "_nodes", "_values")

    def __init__(self, a: float, b: float, values: np.ndarray):
        arr = np.array(values, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise InputError(f"Grid values must have shape (N+1, dim), got {arr.shape}")
        N = arr.shape[0] - 1
        validate_grid(a, b, N)
        if not np.all(np.isfinite(arr)):
            raise InputError("NaN or infinite function value on the grid")
        arr.setflags(write=False)
        nodes = grid_nodes(a, b, N)
        nodes.setflags(write=False)
        self.a = float(a)
        self.b = float(b)
        self.N = N
        self._nodes = nodes
        self._values = arr

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return int(self._values.shape[1])

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.N

    def value(self, index: int) -> ComplexVector:
        return ComplexVector(self._values[index])

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self._values) ** 2, axis=1))

    def scaled(self, factor: complex) -> "GridFunction":
        return GridFunction(self.a, self.b, self._values * factor)

    def __repr__(self) -> str:
        return f"GridFunction(a={self.a}, b={self.b}, N={self.N}, dim={self.dim})"


def validate_grid(a: float, b: float, N: int) -> None:
    if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
        raise InputError(f"Interval needs finite a < b, got [{a}, {b}]")
    if N < 2 or N % 2:
        raise InputError(f"Grid needs an even N >= 2, got {N}")


def grid_nodes(a: float, b: float, N: int) -> np.ndarray:
    return np.linspace(a, b, N + 1)


# Scalar profiles

def profile_values(profile: ScalarProfile, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    kind = profile.kind
    if kind == "zero":
        return np.zeros_like(t)
    if kind == "constant":
        return np.full_like(t, profile.value)
    if kind in ("linear", "polynomial"):
        # coefficients are stored lowest degree first
        return np.polynomial.polynomial.polyval(t, profile.coefficients)
    if kind == "sine":
        return profile.amplitude * np.sin(profile.frequency * t + profile.phase)
    if kind == "cosine":
        return profile.amplitude * np.cos(profile.frequency * t + profile.phase)
    if kind == "exponential":
        return profile.amplitude * np.exp(profile.rate * t)
    raise InputError(f"Unknown profile kind {kind}")


def profile_derivative(profile: ScalarProfile, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    kind = profile.kind
    if kind in ("zero", "constant"):
        return np.zeros_like(t)
    if kind in ("linear", "polynomial"):
        if len(profile.coefficients) < 2:
            return np.zeros_like(t)
        coeffs = np.polynomial.polynomial.polyder(profile.coefficients)
        return np.polynomial.polynomial.polyval(t, coeffs) * np.ones_like(t)
    if kind == "sine":
        return profile.amplitude * profile.frequency * np.cos(profile.frequency * t + profile.phase)
    if kind == "cosine":
        return -profile.amplitude * profile.frequency * np.sin(profile.frequency * t + profile.phase)
    if kind == "exponential":
        return profile.amplitude * profile.rate * np.exp(profile.rate * t)
    raise InputError(f"Unknown profile kind {kind}")


def node_values(profile: NodeProfile, f: GridFunction) -> np.ndarray:
    """Profile values at the nodes of f; explicit lists must have N + 1 entries."""
    if isinstance(profile, ScalarProfile):
        return profile_values(profile, f.nodes)
    arr = np.asarray(profile, dtype=float)
    if arr.shape != (f.N + 1,):
        raise InputError(f"Explicit profile needs {f.N + 1} node values, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("Non-finite value in explicit profile")
    return arr


# Vector-valued catalog

def as_vector(coords: Sequence) -> ComplexVector:
    return ComplexVector(coords)


def evaluate_function(spec: FunctionSpec, t: np.ndarray, a: float, b: float) -> np.ndarray:
    """Values of a catalog function at the points t, shape (len(t), dim)."""
    t = np.asarray(t, dtype=float)
    col = t.reshape(-1, 1)
    kind = spec.kind
    if kind == "constant":
        v = as_vector(spec.vector).coords
        return np.broadcast_to(v, (t.size, v.size)).copy()
    if kind == "polynomial":
        coeffs = [as_vector(c).coords for c in spec.coefficients]
        dims = {c.size for c in coeffs}
        if len(dims) != 1:
            raise InputError("Polynomial coefficients must share one dimension")
        out = np.zeros((t.size, coeffs[0].size), dtype=np.complex128)
        # Horner, highest degree first
        for c in reversed(coeffs):
            out = out * col + c
        return out
    if kind == "circle":
        arg = spec.frequency * t + spec.phase
        return spec.amplitude * np.column_stack([np.cos(arg), np.sin(arg)]).astype(np.complex128)
    if kind == "phase":
        arg = spec.frequency * t + spec.phase
        return (spec.amplitude * np.exp(1j * arg)).reshape(-1, 1)
    if kind == "profile":
        v = as_vector(spec.vector).coords
        return profile_values(spec.profile, t).reshape(-1, 1) * v
    if kind == "exp_decay":
        v = as_vector(spec.vector).coords
        return np.exp(-spec.rate * col) * v
    if kind == "sign_switch":
        v = as_vector(spec.vector).coords
        mid = 0.5 * (a + b)
        sign = np.sign(mid - t).reshape(-1, 1)
        return sign * v
    raise InputError(f"Unknown function kind {kind}")


def sample(evaluator: Evaluator, a: float, b: float, N: int) -> GridFunction:
    """Evaluate a descriptor (or a plain callable of t) at the uniform nodes."""
    validate_grid(a, b, N)
    nodes = grid_nodes(a, b, N)
    if isinstance(evaluator, FunctionSpec):
        values = evaluate_function(evaluator, nodes, a, b)
    else:
        values = np.array([
            ComplexVector(np.atleast_1d(np.asarray(evaluator(float(t)), dtype=np.complex128))).coords
            for t in nodes
        ])
    return GridFunction(a, b, values)


def make_lagrange_family(spec: LagrangeFamilySpec, N: int) -> Tuple[GridFunction, float, float]:
    """phi = exp(-psi) on the grid, with gamma = exp(theta (b-a)), Gamma = exp(Theta (b-a)).

    For t <= s the mean value theorem gives gamma phi(s) <= phi(t) <= Gamma phi(s).
    """
    validate_grid(spec.a, spec.b, N)
    fine = grid_nodes(spec.a, spec.b, DERIVATIVE_REFINEMENT * N)
    slope = profile_derivative(spec.psi, fine)
    lo, hi = float(np.min(slope)), float(np.max(slope))
    if lo < spec.theta - DERIVATIVE_TOLERANCE or hi > spec.Theta + DERIVATIVE_TOLERANCE:
        raise HypothesisConstructionError(
            f"psi' ranges over [{lo:.6g}, {hi:.6g}], outside [{spec.theta}, {spec.Theta}]"
        )
    nodes = grid_nodes(spec.a, spec.b, N)
    phi = np.exp(-profile_values(spec.psi, nodes))
    logger.debug(f"Lagrange family on [{spec.a}, {spec.b}]: gamma={spec.gamma:.6g}, Gamma={spec.Gamma:.6g}")
    return GridFunction(spec.a, spec.b, phi.reshape(-1, 1)), spec.gamma, spec.Gamma


def make_ball_family(spec: BallFamilySpec, a: float, b: float, N: int) -> GridFunction:
    """f(t) = e + rho * modulation(t) * u, so that ||f(t) - e|| <= rho at every node."""
    validate_grid(a, b, N)
    e = as_vector(spec.e)
    u = as_vector(spec.u)
    if e.dim != u.dim:
        raise HypothesisConstructionError(f"e and u differ in dimension: {e.dim} != {u.dim}")
    if not is_unit(e) or not is_unit(u):
        raise HypothesisConstructionError("Ball family needs unit vectors e and u")
    if abs(re_inner(u, e)) > 1e-12:
        raise HypothesisConstructionError("Ball family needs Re<u, e> = 0")
    nodes = grid_nodes(a, b, N)
    mod = profile_values(spec.modulation, nodes)
    if np.max(np.abs(mod)) > 1.0 + 1e-12:
        raise HypothesisConstructionError("Modulation must take values in [-1, 1]")
    mod = np.clip(mod, -1.0, 1.0)
    values = e.coords + spec.rho * mod.reshape(-1, 1) * u.coords
    return GridFunction(a, b, values)


def make_constant_direction(profile: ScalarProfile, e: ComplexVector, a: float, b: float, N: int) -> GridFunction:
    """f(t) = phi(t) e, the scalar-multiple family."""
    validate_grid(a, b, N)
    phi = profile_values(profile, grid_nodes(a, b, N))
    return GridFunction(a, b, phi.reshape(-1, 1) * e.coords)


def pairwise_ratio_bounds(f: GridFunction) -> Tuple[float, float]:
    """(m, M) clipped to M >= 1 >= m from the ratios phi(t)/phi(s), t <= s, of a positive dim-1 family."""
    phi = f.values[:, 0].real
    if np.any(phi <= 0):
        raise InputError("Ratio bounds need a strictly positive scalar family")
    ratios = phi.reshape(-1, 1) / phi.reshape(1, -1)
    upper = np.triu(np.ones_like(ratios, dtype=bool))
    m = min(1.0, float(np.min(ratios[upper])))
    M = max(1.0, float(np.max(ratios[upper])))
    return m, M
