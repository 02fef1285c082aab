"""
Quadrature of grid functions: Bochner integrals on [a, b] and double
integrals over the triangle {(t, s): a <= t <= s <= b}.

Every integral is a weighted sum of stored node values, so hypothesis
checks and inequality evaluations see exactly the same function.
"""

import logging
from typing import Callable, Optional, Union

import numpy as np

from app.core.errors import InputError
from app.core.functions import GridFunction, profile_values
from app.core.vectors import ComplexVector, gram_matrix
from app.db.models import KernelSpec, QuadratureConfig, Rule, ScalarProfile

logger = logging.getLogger(__name__)

PairKernel = Union[np.ndarray, Callable[[np.ndarray, np.ndarray], np.ndarray]]
Weight = Union[np.ndarray, ScalarProfile, Callable[[np.ndarray], np.ndarray]]


def quadrature_weights(rule: Rule, N: int, h: float) -> np.ndarray:
    """Row vector w with integral ~= w @ values on N + 1 uniform nodes."""
    if N < 1:
        raise InputError(f"Need at least one interval, got N={N}")
    if rule == "trapezoid":
        w = np.full(N + 1, h)
        w[0] = w[-1] = h / 2
        return w
    if rule == "simpson":
        if N % 2:
            raise InputError(f"Composite Simpson needs an even N, got {N}")
        w = np.full(N + 1, 2 * h / 3)
        w[1::2] = 4 * h / 3
        w[0] = w[-1] = h / 3
        return w
    raise InputError(f"Unknown quadrature rule {rule}")


def _weights(f: GridFunction, cfg: QuadratureConfig, rule: Optional[Rule] = None) -> np.ndarray:
    if f.N != cfg.N:
        raise InputError(f"Grid has N={f.N} but the quadrature config expects N={cfg.N}")
    return quadrature_weights(rule or cfg.rule, f.N, f.h)


def bochner_integral(f: GridFunction, cfg: QuadratureConfig) -> ComplexVector:
    """Componentwise quadrature of the node values."""
    return ComplexVector(_weights(f, cfg) @ f.values)


def integral_norm(f: GridFunction, cfg: QuadratureConfig) -> float:
    return float(_weights(f, cfg) @ f.norms())


def integrate_nodes(values: np.ndarray, f: GridFunction, cfg: QuadratureConfig) -> float:
    """Quadrature of a real node profile sampled on the grid of f."""
    values = np.asarray(values, dtype=float)
    if values.shape != (f.N + 1,):
        raise InputError(f"Expected {f.N + 1} node values, got {values.shape}")
    return float(_weights(f, cfg) @ values)


def _weight_values(weight: Weight, f: GridFunction) -> np.ndarray:
    if isinstance(weight, ScalarProfile):
        return profile_values(weight, f.nodes)
    if callable(weight):
        return np.asarray(weight(f.nodes), dtype=float) * np.ones(f.N + 1)
    return np.asarray(weight, dtype=float)


def weighted_norm_integral(f: GridFunction, weight: Weight, cfg: QuadratureConfig) -> float:
    """Quadrature of s -> weight(s) ||f(s)||^2."""
    w = _weight_values(weight, f)
    if w.shape != (f.N + 1,) or not np.all(np.isfinite(w)):
        raise InputError("Weight must be finite at every node")
    return integrate_nodes(w * f.norms() ** 2, f, cfg)


def triangle_weights(f: GridFunction, cfg: QuadratureConfig) -> np.ndarray:
    """W[i, j] = w_i w_j for i < j, w_i^2 / 2 on the diagonal, 0 below it.

    This is the product rule of the symmetric extension of a kernel, halved.
    With trapezoid weights it is the product trapezoid rule restricted to
    t <= s with weight 1/2 on the diagonal.
    """
    w = _weights(f, cfg, cfg.pair_rule)
    W = np.triu(np.outer(w, w))
    W[np.diag_indices_from(W)] *= 0.5
    return W


def kernel_values(kernel: PairKernel, f: GridFunction) -> np.ndarray:
    """Kernel matrix K[i, j] = k(t_i, s_j); only i <= j is used."""
    size = f.N + 1
    if callable(kernel):
        T, S = np.meshgrid(f.nodes, f.nodes, indexing="ij")
        try:
            K = np.asarray(kernel(T, S), dtype=float) * np.ones((size, size))
        except (TypeError, ValueError, ArithmeticError) as e:
            raise InputError(f"Kernel evaluation failed: {e}")
    else:
        K = np.asarray(kernel, dtype=float)
    if K.shape != (size, size):
        raise InputError(f"Kernel must be {size}x{size}, got {K.shape}")
    if not np.all(np.isfinite(np.triu(K))):
        raise InputError("Kernel is not finite on the triangle")
    return K


def triangle_integral(kernel: PairKernel, f: GridFunction, cfg: QuadratureConfig) -> float:
    """Double integral of k(t, s) over a <= t <= s <= b.

    Rows are summed first, then the row sums in order, so the result does
    not depend on how the kernel was produced.
    """
    K = np.triu(kernel_values(kernel, f))
    rows = np.sum(triangle_weights(f, cfg) * K, axis=1)
    return float(np.sum(rows))


# Pair kernels built from the node values

def schwarz_gap_matrix(f: GridFunction) -> np.ndarray:
    """||f(t_i)|| ||f(t_j)|| - Re<f(t_i), f(t_j)>."""
    n = f.norms()
    return np.outer(n, n) - gram_matrix(f.values).real


def kernel_matrix(spec: KernelSpec, f: GridFunction) -> np.ndarray:
    """Node matrix of a catalog kernel."""
    size = f.N + 1
    if spec.kind == "zero":
        return np.zeros((size, size))
    if spec.kind == "constant":
        return np.full((size, size), spec.value * spec.scale)
    if spec.kind == "schwarz_gap":
        return spec.scale * schwarz_gap_matrix(f)
    if spec.kind == "cos_difference":
        T, S = np.meshgrid(f.nodes, f.nodes, indexing="ij")
        return spec.scale * (1.0 - np.cos(S - T))
    if spec.kind == "mM_bound":
        c = 0.25 * (spec.M - spec.m) ** 2 / (spec.M + spec.m)
        return spec.scale * c * np.tile(f.norms() ** 2, (size, 1))
    raise InputError(f"Unknown kernel kind {spec.kind}")


def quadratic_identity_residual(f: GridFunction, cfg: QuadratureConfig) -> float:
    """(int ||f||)^2 - ||int f||^2 - 2 * triangle integral of the Schwarz gap."""
    total = integral_norm(f, cfg)
    integral = bochner_integral(f, cfg).coords
    defect = total ** 2 - float(np.sum(np.abs(integral) ** 2))
    return defect - 2.0 * triangle_integral(schwarz_gap_matrix(f), f, cfg)


def triangle_inner_integral(f: GridFunction, cfg: QuadratureConfig) -> float:
    """Double integral of Re<f(t), f(s)> over the triangle; equals ||int f||^2 / 2."""
    return triangle_integral(gram_matrix(f.values).real, f, cfg)


def triangle_norm_integral(f: GridFunction, cfg: QuadratureConfig, variable: str = "t") -> float:
    """Double integral over the triangle of ||f(t)||^2 (variable="t") or ||f(s)||^2 (variable="s").

    By integration by parts these equal the integrals of (b - s)||f(s)||^2
    and (s - a)||f(s)||^2 respectively.
    """
    sq = f.norms() ** 2
    size = f.N + 1
    if variable == "t":
        K = np.tile(sq.reshape(-1, 1), (1, size))
    elif variable == "s":
        K = np.tile(sq, (size, 1))
    else:
        raise InputError(f"variable must be 't' or 's', got {variable}")
    return triangle_integral(K, f, cfg)
