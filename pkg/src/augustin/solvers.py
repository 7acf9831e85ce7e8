"""Riemannian gradient descent and the fixed-point baseline.

RGD under the Poincare metric applied to ``g(x) = sum(x) + f(x)`` with step
``1 / (|1 - alpha| + 1)`` reads

    x_{t+1} = x_t * exp(-step * x_t * grad g(x_t)) = x_t * exp(-step * (x_t - m(x_t)))

where ``m(x) = x * -grad f(x)`` is the tilted mean of the rows.  The fixed
point iteration is ``x_{t+1} = m(x_t)``; it is only reliable for ``alpha < 1``.

Iterates are indexed from ``t = 1`` (the starting point).  A run that takes
``k`` steps therefore evaluates ``x_1, ..., x_{k+1}``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .geometry import as_point
from .objective import ChannelInstance, Order, OrderLike, as_order, tilted_mean

CONVERGED = "converged"
MAX_ITERS = "max-iters"
DIVERGED = "diverged"

#: Rise in ``g`` between consecutive RGD iterates treated as divergence.
DESCENT_SLACK = 1e-9
#: Fixed-point divergence detector: window length and oscillation amplitude.
FP_WINDOW = 100
FP_AMPLITUDE = 1e-6
BOX_SLACK = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    order: Order
    max_iters: int = 10_000
    grad_tol: float = 1e-10
    step_override: Optional[float] = None
    trace_every: int = 1
    floor: float = 1e-300

    def __post_init__(self):
        object.__setattr__(self, "order", as_order(self.order))
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ValueError("max_iters must be a non-negative integer")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")
        if not self.grad_tol >= 0:
            raise ValueError("grad_tol must be >= 0")
        if self.step_override is not None and not self.step_override > 0:
            raise ValueError("step_override must be > 0")
        if not self.floor > 0:
            raise ValueError("floor must be > 0")

    @property
    def step(self) -> float:
        return self.order.step if self.step_override is None else float(self.step_override)


@dataclass(frozen=True)
class IterationRecord:
    t: int
    g_value: float
    f_bar_value: float
    rgrad_norm: float
    min_coord: float
    bound_term: float = math.nan
    wall_ns: int = 0


@dataclass
class SolveResult:
    solver: str
    final_x: np.ndarray
    normalized_x: np.ndarray
    f_value: float
    status: str
    iterations: int
    trace: list[IterationRecord] = field(default_factory=list)
    iterates: list[np.ndarray] = field(default_factory=list)
    certificate: Optional[float] = None
    floored: bool = False

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def iterates_upto(self, T: int) -> list[np.ndarray]:
        """Stored iterates ``x_t`` with ``t <= T``."""
        return [x for rec, x in zip(self.trace, self.iterates) if rec.t <= T]

    def certificate_at(self, T: int, x_star, order: OrderLike, floor: float = 1e-300) -> float:
        """Bound on ``f(normalize(x_{T+1})) - f(x_star)`` from the stored iterates."""
        return certificate(self.iterates_upto(T), x_star, order, T, floor=floor)


def normalize(x) -> np.ndarray:
    """Scale ``x`` onto the simplex."""
    x = np.asarray(x, dtype=float)
    return x / _kernels.kahan_sum(x)


def _start(inst: ChannelInstance, x1) -> np.ndarray:
    if x1 is None:
        return np.full(inst.N, 1.0 / inst.N)
    x1 = as_point(x1, "x1").copy()
    if x1.shape != (inst.N,):
        raise ValueError(f"x1 must have dimension {inst.N}")
    if np.any(x1 > 1.0):
        raise ValueError("x1 must satisfy x1 <= 1 componentwise")
    return x1


def rgd_step(inst: ChannelInstance, x, order: OrderLike, step: Optional[float] = None,
             floor: float = 1e-300, full_output: bool = False):
    """One RGD step for ``g``: ``x * exp(-step * x * grad g(x))``.

    Coordinates that underflow below ``floor`` are raised to it; with
    ``full_output=True`` the return value is ``(x_next, floored)``.
    """
    order = as_order(order)
    x = as_point(x)
    if step is None:
        step = order.step
    _, image = tilted_mean(inst, x, order)
    with np.errstate(under="ignore"):
        out = x * np.exp(-step * (x - image))
    floored = bool(np.any(out < floor))
    if floored:
        out = np.maximum(out, floor)
    return (out, floored) if full_output else out


def _record(t, x, f, image, t0, bound=math.nan) -> IterationRecord:
    mass = _kernels.kahan_sum(x)
    return IterationRecord(
        t=t,
        g_value=mass + f,
        f_bar_value=f + math.log(mass),
        rgrad_norm=float(np.linalg.norm(x - image)),
        min_coord=float(x.min()),
        bound_term=bound,
        wall_ns=time.perf_counter_ns() - t0,
    )


def rgd_solve(inst: ChannelInstance, config: SolverConfig, x1=None) -> SolveResult:
    """Minimise ``g`` by Poincare RGD from ``x1`` (default ``1/N``).

    Stops when ``||x * grad g(x)||_2 <= grad_tol`` or after ``max_iters``
    steps.  ``g`` rising by more than ``DESCENT_SLACK`` between iterates
    stops the run with status ``diverged``; this only happens with an
    oversized ``step_override``.  When the run converges the certificate is
    computed against its own normalised final iterate.
    """
    a = config.order.alpha
    t0 = time.perf_counter_ns()
    x = _start(inst, x1)
    f, image = tilted_mean(inst, x, a)
    t = 1
    trace = [_record(t, x, f, image, t0)]
    iterates = [x.copy()]
    status = CONVERGED if trace[0].rgrad_norm <= config.grad_tol else None
    remaining = int(config.max_iters)
    floored = False
    while status is None:
        if remaining == 0:
            status = MAX_ITERS
            break
        chunk = min(config.trace_every - (t - 1) % config.trace_every, remaining)
        x, f, image, _, _, done, code, fl = _kernels.rgd_chunk(
            inst.rows, inst.log_rows, inst.weights, x, f, image, a,
            config.step, config.floor, chunk, config.grad_tol, DESCENT_SLACK)
        floored |= fl
        remaining -= done
        t += done
        trace.append(_record(t, x, f, image, t0))
        iterates.append(x.copy())
        if code == _kernels.DIVERGED:
            status = DIVERGED
        elif code == _kernels.CONVERGED:
            status = CONVERGED
    xbar = normalize(x)
    result = SolveResult(
        solver="rgd", final_x=x, normalized_x=xbar, f_value=trace[-1].f_bar_value,
        status=status, iterations=t - 1, trace=trace, iterates=iterates, floored=floored)
    if status == CONVERGED and result.iterations > 0:
        result.certificate = result.certificate_at(result.iterations, xbar, config.order,
                                                   floor=config.floor)
    return result


def fixed_point_step(inst: ChannelInstance, x, order: OrderLike) -> np.ndarray:
    """Fixed-point map ``x -> x * -grad f(x)``; the image lies on the simplex."""
    x = as_point(x)
    return tilted_mean(inst, x, order)[1]


def _oscillating(history: Sequence[float], window: int, amplitude: float) -> bool:
    if len(history) <= window:
        return False
    span = history[-window - 1:]
    return span[-1] >= span[0] and max(span) - min(span) > amplitude


def fixed_point_solve(inst: ChannelInstance, config: SolverConfig, x1=None) -> SolveResult:
    """Iterate the fixed-point map until ``||x_{t+1} - x_t||_1 <= grad_tol``.

    For ``alpha > 1`` the map typically settles into an oscillation; a run is
    declared ``diverged`` once the normalised objective over the last
    ``FP_WINDOW`` steps fails to decrease while still oscillating by more
    than ``FP_AMPLITUDE``.
    """
    a = config.order.alpha
    t0 = time.perf_counter_ns()
    x = _start(inst, x1)
    f, image = tilted_mean(inst, x, a)
    t = 1
    trace = [_record(t, x, f, image, t0)]
    iterates = [x.copy()]
    history = [trace[0].f_bar_value]
    status = None
    for _ in range(int(config.max_iters)):
        x_next = image
        f, image = tilted_mean(inst, x_next, a)
        delta = float(np.abs(x_next - x).sum())
        x = x_next
        t += 1
        rec = _record(t, x, f, image, t0)
        history.append(rec.f_bar_value)
        if not math.isfinite(f):
            status = DIVERGED
        elif delta <= config.grad_tol:
            status = CONVERGED
        elif _oscillating(history, FP_WINDOW, FP_AMPLITUDE):
            status = DIVERGED
        if status is not None or (t - 1) % config.trace_every == 0:
            trace.append(rec)
            iterates.append(x.copy())
        if status is not None:
            break
    if status is None:
        status = MAX_ITERS
        if trace[-1].t != t:
            trace.append(_record(t, x, f, image, t0))
            iterates.append(x.copy())
    return SolveResult(
        solver="fixed-point", final_x=x, normalized_x=normalize(x),
        f_value=trace[-1].f_bar_value, status=status, iterations=t - 1,
        trace=trace, iterates=iterates)


def bound_term(x_star, x) -> float:
    """``||x_star / x - 1||_2**2``."""
    with np.errstate(over="ignore", divide="ignore"):
        r = np.asarray(x_star, dtype=float) / np.asarray(x, dtype=float) - 1.0
        return float(np.dot(r, r))


def certificate(iterates: Sequence[np.ndarray], x_star, order: OrderLike, T: int,
                floor: float = 1e-300) -> float:
    """Ex-post optimality bound ``2L/T * max_t ||x_star / x_t - 1||**2``.

    ``iterates`` are the (stored) ``x_t`` with ``t <= T`` and ``L = |1-alpha|+1``.
    The max over the observed iterates stands in for the supremum over all
    ``t``.  Returns ``inf`` if some iterate sits at the ``floor`` in a
    coordinate where ``x_star`` is positive.
    """
    L = as_order(order).smoothness
    if T < 1:
        raise ValueError("T must be >= 1")
    if len(iterates) == 0:
        raise ValueError("need at least one iterate")
    x_star = np.asarray(x_star, dtype=float)
    worst = 0.0
    for x in iterates:
        x = np.asarray(x, dtype=float)
        if np.any((x <= floor) & (x_star > 0)):
            return math.inf
        worst = max(worst, bound_term(x_star, x))
    return 2.0 * L / T * worst


def certificate_curve(result: SolveResult, x_star, order: OrderLike,
                      floor: float = 1e-300) -> tuple[np.ndarray, np.ndarray]:
    """Certificates for every recorded prefix in one pass.

    Returns ``(T, bound)`` where ``T`` are the recorded iteration indices
    ``t >= 1`` and ``bound[k] = certificate(iterates with t <= T[k], ...)``.
    """
    L = as_order(order).smoothness
    x_star = np.asarray(x_star, dtype=float)
    ts = np.array([rec.t for rec in result.trace])
    terms = np.array([math.inf if np.any((x <= floor) & (x_star > 0)) else bound_term(x_star, x)
                      for x in result.iterates])
    return ts, 2.0 * L / ts * np.maximum.accumulate(terms)


def fill_bound_terms(result: SolveResult, x_star) -> SolveResult:
    """Return a copy of ``result`` whose trace carries ``||x_star / x_t - 1||**2``."""
    trace = [replace(rec, bound_term=bound_term(x_star, x))
             for rec, x in zip(result.trace, result.iterates)]
    return replace(result, trace=trace)


def reference_optimum(inst: ChannelInstance, order: OrderLike, iterations: int,
                      x1=None) -> tuple[np.ndarray, float]:
    """Normalised iterate and objective after exactly ``iterations`` RGD steps.

    Runs with ``grad_tol = 0`` so the run does not stop early; used as the
    stand-in optimum for certificates.
    """
    cfg = SolverConfig(order=order, max_iters=iterations, grad_tol=0.0,
                       trace_every=max(1, iterations))
    res = rgd_solve(inst, cfg, x1)
    return res.normalized_x, res.f_value
