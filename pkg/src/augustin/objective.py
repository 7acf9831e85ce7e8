"""Renyi divergences and the Augustin objective.

For a channel with prior ``w`` over rows ``p_m`` the order-``alpha`` Augustin
information is ``min_x f(x)`` over the simplex, where

    f(x) = sum_m w_m * D_alpha(p_m || x)

and ``D_alpha(p || x) = log(<p**alpha, x**(1-alpha)>) / (alpha - 1)``.  The
formula is used as-is off the simplex, which gives ``f(c*x) = f(x) - log c``.
The relaxation ``g(x) = sum(x) + f(x)`` has the same minimiser over the whole
non-negative orthant, and that is the function the solvers descend.

``x * -grad f(x)`` is the weighted average of the normalised tilted rows
``p**alpha * x**(1-alpha) / <p**alpha, x**(1-alpha)>`` and always lies in the
simplex; :func:`tilted_mean` returns it together with ``f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from . import _kernels
from .geometry import as_point

SUM_TOL = 1e-12


class InstanceError(ValueError):
    """A channel description violates the instance invariants."""


@dataclass(frozen=True)
class Order:
    """A Renyi order ``alpha > 0``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and a > 0):
            raise ValueError(f"order must be finite and > 0, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def regime(self) -> str:
        if self.alpha < 1.0:
            return "below-one"
        if self.alpha == 1.0:
            return "one"
        return "above-one"

    @property
    def smoothness(self) -> float:
        """Geodesic smoothness constant ``|1 - alpha| + 1`` of ``g`` in the unit box."""
        return abs(1.0 - self.alpha) + 1.0

    @property
    def step(self) -> float:
        return 1.0 / self.smoothness

    def __float__(self) -> float:
        return self.alpha


OrderLike = Union[Order, float]


def as_order(order: OrderLike) -> Order:
    return order if isinstance(order, Order) else Order(order)


def _check_simplex(v: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise InstanceError(f"{what} must be finite and non-negative")
    if abs(math.fsum(v) - 1.0) > SUM_TOL:
        raise InstanceError(f"{what} must sum to 1 (got {math.fsum(v)!r})")


@dataclass(frozen=True, eq=False)
class ChannelInstance:
    """Prior ``weights`` (length M) over channel ``rows`` (M x N, each on the simplex).

    Rows may contain zeros.  A column that is zero in every row with positive
    weight is a *vacuous* output symbol; its optimal mass is 0.
    """

    weights: np.ndarray
    rows: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        P = np.array(self.rows, dtype=float)
        if P.ndim != 2 or P.shape[0] < 1 or P.shape[1] < 1:
            raise InstanceError(f"rows must be a non-empty 2-D array, got shape {P.shape}")
        if w.shape != (P.shape[0],):
            raise InstanceError(f"expected {P.shape[0]} weights, got shape {w.shape}")
        _check_simplex(w, "weights")
        for m in range(P.shape[0]):
            _check_simplex(P[m], f"row {m}")
        w.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rows", P)

    @property
    def M(self) -> int:
        return self.rows.shape[0]

    @property
    def N(self) -> int:
        return self.rows.shape[1]

    @cached_property
    def log_rows(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            out = np.log(self.rows)
        out.setflags(write=False)
        return out

    @cached_property
    def vacuous(self) -> np.ndarray:
        """Boolean mask of output symbols no weighted row can produce."""
        return ~np.any(self.rows[self.weights > 0] > 0, axis=0)

    @property
    def has_vacuous_symbol(self) -> bool:
        return bool(self.vacuous.any())

    def __eq__(self, other):
        if not isinstance(other, ChannelInstance):
            return NotImplemented
        return (np.array_equal(self.weights, other.weights)
                and np.array_equal(self.rows, other.rows))

    __hash__ = None


def _as_nonneg(x, n: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"expected a point of dimension {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("point must have finite, non-negative coordinates")
    return arr


def _logx(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


def renyi_divergence(p, x, order: OrderLike) -> float:
    """Order-``alpha`` Renyi divergence ``D_alpha(p || x)``; the KL divergence at ``alpha = 1``.

    ``p`` is a probability vector; ``x`` may be any non-negative vector.
    Returns ``inf`` when the divergence is infinite (e.g. ``alpha >= 1`` and
    ``x`` vanishes where ``p`` does not).

    >>> round(renyi_divergence([1.0, 0.0], [0.5, 0.5], 3.0), 12) == round(math.log(2), 12)
    True
    """
    a = as_order(order).alpha
    p = np.asarray(p, dtype=float)
    x = _as_nonneg(x, p.shape[0])
    if p.ndim != 1:
        raise ValueError("p must be 1-D")
    supp = p > 0
    lp = np.log(p[supp])
    lx = _logx(x[supp])
    if a == 1.0:
        if np.any(lx == -np.inf):
            return math.inf
        return math.fsum(p[supp] * (lp - lx))
    terms = a * lp + (1.0 - a) * lx
    mx = terms.max() if terms.size else -np.inf
    if not np.isfinite(mx):
        return math.inf
    lse = mx + math.log(math.fsum(np.exp(terms - mx)))
    return lse / (a - 1.0)


def tilted_mean(inst: ChannelInstance, x, order: OrderLike) -> tuple[float, np.ndarray]:
    """Return ``(f_alpha(x), x * -grad f_alpha(x))`` in one pass over the rows."""
    a = as_order(order).alpha
    x = _as_nonneg(x, inst.N)
    f, image = _kernels.evaluate(inst.rows, inst.log_rows, inst.weights, _logx(x), a)
    return float(f), image


def f_alpha(inst: ChannelInstance, x, order: OrderLike) -> float:
    """Augustin objective ``sum_m w_m D_alpha(p_m || x)``."""
    return tilted_mean(inst, x, order)[0]


def g_alpha(inst: ChannelInstance, x, order: OrderLike) -> float:
    """Relaxed objective ``sum(x) + f_alpha(x)``."""
    x = _as_nonneg(x, inst.N)
    return _kernels.kahan_sum(x) + f_alpha(inst, x, order)


def grad_f_alpha(inst: ChannelInstance, x, order: OrderLike) -> np.ndarray:
    """Euclidean gradient ``-E_p[p**a * x**-a / <p**a, x**(1-a)>]`` (``-E_p[p / x]`` at a=1)."""
    x = as_point(x)
    _, image = tilted_mean(inst, x, order)
    return -image / x


def grad_g_alpha(inst: ChannelInstance, x, order: OrderLike) -> np.ndarray:
    return 1.0 + grad_f_alpha(inst, x, order)


def order1_solution(inst: ChannelInstance) -> tuple[np.ndarray, float]:
    """Closed-form minimiser and value at ``alpha = 1``.

    The minimiser is the output marginal ``sum_m w_m p_m`` and the value is
    the Shannon mutual information.  Coordinates of the marginal may be 0.
    """
    _, marginal = _kernels.evaluate(inst.rows, inst.log_rows, inst.weights,
                                    np.zeros(inst.N), 1.0)
    return marginal, f_alpha(inst, marginal, 1.0)
