"""
Finite-dimensional complex inner-product arithmetic.

The model Hilbert space is C^n with the inner product
<x, y> = sum_k x_k * conj(y_k), i.e. linear in the first argument and
conjugate-linear in the second. Real problems are embedded with zero
imaginary parts; there is no separate real code path.
"""

import logging
from typing import Any, Iterable, List, Sequence, Union

import numpy as np

from app.core.errors import InputError

logger = logging.getLogger(__name__)

Scalar = complex
Coordinate = Union[float, int, complex, Sequence[float]]

UNIT_TOLERANCE = 1e-12


def as_scalar(value: Any) -> Scalar:
    """Convert a number to a finite complex scalar."""
    z = complex(value)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise InputError(f"Non-finite scalar: {value!r}")
    return z


def parse_coordinate(value: Coordinate) -> complex:
    """Parse one JSON coordinate: a real number or an [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InputError(f"Complex coordinate must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex, np.number)):
        return complex(value)
    raise InputError(f"Unsupported coordinate {value!r}")


class ComplexVector:
    """Immutable element of C^n."""

    __slots__ = ("_coords",)

    def __init__(self, coords: Union[Iterable[Coordinate], np.ndarray]):
        if isinstance(coords, np.ndarray):
            arr = np.array(coords, dtype=np.complex128)
        else:
            arr = np.array([parse_coordinate(c) for c in coords], dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise InputError(f"A vector needs dim >= 1 coordinates, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("NaN or infinite coordinate in vector")
        arr.setflags(write=False)
        self._coords = arr

    @classmethod
    def basis(cls, dim: int, index: int) -> "ComplexVector":
        """Standard unit vector e_index of C^dim."""
        if dim < 1 or not 0 <= index < dim:
            raise InputError(f"Invalid basis vector {index} of C^{dim}")
        arr = np.zeros(dim, dtype=np.complex128)
        arr[index] = 1.0
        return cls(arr)

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dim(self) -> int:
        return int(self._coords.size)

    def to_json(self) -> List[Any]:
        """Real coordinates as numbers, complex ones as [re, im] pairs."""
        out: List[Any] = []
        for z in self._coords:
            out.append(float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)])
        return out

    def _check_dim(self, other: "ComplexVector") -> None:
        if self.dim != other.dim:
            raise InputError(f"Dimension mismatch: {self.dim} != {other.dim}")

    def __add__(self, other: "ComplexVector") -> "ComplexVector":
        self._check_dim(other)
        return ComplexVector(self._coords + other._coords)

    def __sub__(self, other: "ComplexVector") -> "ComplexVector":
        self._check_dim(other)
        return ComplexVector(self._coords - other._coords)

    def __mul__(self, scalar: Any) -> "ComplexVector":
        return ComplexVector(self._coords * as_scalar(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ComplexVector":
        return ComplexVector(-self._coords)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComplexVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._coords, other._coords))

    def __hash__(self) -> int:
        return hash(self._coords.tobytes())

    def __repr__(self) -> str:
        return f"ComplexVector({self._coords.tolist()!r})"


def inner(x: ComplexVector, y: ComplexVector) -> Scalar:
    """<x, y> = sum_k x_k conj(y_k)."""
    if x.dim != y.dim:
        raise InputError(f"Dimension mismatch: {x.dim} != {y.dim}")
    # vdot conjugates its first argument
    return complex(np.vdot(y.coords, x.coords))


def re_inner(x: ComplexVector, y: ComplexVector) -> float:
    return inner(x, y).real


def norm(x: ComplexVector) -> float:
    return float(np.sqrt(max(re_inner(x, x), 0.0)))


def is_unit(x: ComplexVector, tol: float = UNIT_TOLERANCE) -> bool:
    return abs(norm(x) - 1.0) <= tol


def schwarz_gap(x: ComplexVector, y: ComplexVector) -> float:
    """||x|| ||y|| - Re<x, y>, nonnegative up to rounding."""
    return norm(x) * norm(y) - re_inner(x, y)


# Batch forms used by the grid code. Rows of `values` are vectors.

def gram_matrix(values: np.ndarray) -> np.ndarray:
    """G[i, j] = <values[i], values[j]>."""
    return values @ values.conj().T


def row_norms(values: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(values) ** 2, axis=-1))


def row_re_inner(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Re<x_k, y_k> for matching rows of two batches."""
    return np.sum(x * y.conj(), axis=-1).real
