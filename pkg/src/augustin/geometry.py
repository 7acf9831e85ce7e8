"""Closed-form primitives of the Poincare metric on the positive orthant.

The metric at ``x`` is ``<u, v>_x = <u / x, v / x>``.  Geodesics are
coordinate-wise geometric interpolations, so every map below is elementwise.

Points are plain 1-D float arrays, checked by :func:`as_point`.  Tangent
vectors carry their base point so that pairings at different bases fail
loudly instead of silently returning garbage.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Default relative tolerances used by the property checks in the test-suite
#: and by :mod:`augustin.validation`.
EXP_LOG_RTOL = 1e-10
NORM_DIST_RTOL = 1e-12
RIESZ_RTOL = 1e-12
GEODESIC_RTOL = 1e-10


class GeometryError(ValueError):
    """Contract violation in a geometric primitive."""


class NumericalOverflowError(ArithmeticError):
    """The exponential map left the representable range."""


def as_point(x, name: str = "x") -> np.ndarray:
    """Validate and return ``x`` as a strictly positive, finite 1-D array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise GeometryError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
        raise GeometryError(f"{name} must have finite, strictly positive coordinates")
    return arr


def _same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise GeometryError(f"dimension mismatch: {x.shape} vs {y.shape}")


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A direction in the tangent space at ``base``."""

    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        base = as_point(self.base, "base")
        direction = np.asarray(self.direction, dtype=float)
        _same_dim(base, direction)
        if not np.all(np.isfinite(direction)):
            raise GeometryError("tangent direction must be finite")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", direction)

    def norm(self) -> float:
        return float(np.sqrt(poincare_inner(self, self)))


def _check_same_base(u: TangentVector, v: TangentVector) -> None:
    if u.base is v.base:
        return
    if u.base.shape != v.base.shape or not np.array_equal(u.base, v.base):
        raise GeometryError("tangent vectors are anchored at different base points")


def poincare_inner(u: TangentVector, v: TangentVector) -> float:
    """Metric pairing ``sum(u_i v_i / x_i**2)`` of two vectors at the same base."""
    _check_same_base(u, v)
    x = u.base
    return float(np.dot(u.direction / x, v.direction / x))


def poincare_dist(x, y) -> float:
    """Geodesic distance ``||log(y / x)||_2``."""
    x = as_point(x)
    y = as_point(y, "y")
    _same_dim(x, y)
    # ordering each pair makes the result exactly symmetric in x and y
    return float(np.linalg.norm(np.log(np.maximum(x, y) / np.minimum(x, y))))


def poincare_exp(v: TangentVector) -> np.ndarray:
    """Exponential map ``x * exp(v / x)``.

    Raises
    ------
    NumericalOverflowError
        If any coordinate overflows to ``inf`` (or underflows to 0, which
        would leave the manifold).
    """
    x = v.base
    with np.errstate(over="ignore", under="ignore"):
        out = x * np.exp(v.direction / x)
    if not np.all(np.isfinite(out)) or not np.all(out > 0):
        raise NumericalOverflowError("exponential map left the positive orthant's representable range")
    return out


def poincare_log(x, y) -> TangentVector:
    """Logarithmic map at ``x``: the tangent vector ``x * log(y / x)``."""
    x = as_point(x)
    y = as_point(y, "y")
    _same_dim(x, y)
    return TangentVector(x, x * np.log(y / x))


def geodesic_point(x, y, t: float) -> np.ndarray:
    """Point ``x**(1-t) * y**t`` on the geodesic from ``x`` (t=0) to ``y`` (t=1)."""
    if not 0.0 <= t <= 1.0:
        raise GeometryError(f"geodesic parameter must lie in [0, 1], got {t}")
    x = as_point(x)
    y = as_point(y, "y")
    _same_dim(x, y)
    if t == 0.0:
        return x.copy()
    if t == 1.0:
        return y.copy()
    return np.exp((1.0 - t) * np.log(x) + t * np.log(y))


def riemannian_grad(x, egrad) -> TangentVector:
    """Convert a Euclidean gradient at ``x`` into the Riemannian one, ``x**2 * egrad``."""
    x = as_point(x)
    egrad = np.asarray(egrad, dtype=float)
    _same_dim(x, egrad)
    return TangentVector(x, x * x * egrad)
