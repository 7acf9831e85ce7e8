"""Independent oracles and lemma-level probes.

Nothing here reuses the solver code paths it checks: gradients are checked
against central differences of the objective, optima against brute-force
grids, and the geodesic smoothness bounds against second differences of the
objective sampled along the geodesic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import objective
from .geometry import TangentVector, as_point, geodesic_point, poincare_dist, poincare_inner, riemannian_grad
from .objective import ChannelInstance, OrderLike, as_order
from .solvers import SolverConfig, rgd_solve


@dataclass(frozen=True)
class ProbeReport:
    name: str
    samples: int
    worst_violation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.worst_violation <= self.threshold)

    def as_dict(self) -> dict:
        return {"name": self.name, "samples": self.samples,
                "worst_violation": self.worst_violation,
                "threshold": self.threshold, "pass": self.passed}


def _objective(which) -> Callable:
    if callable(which):
        return which
    return {"f": objective.f_alpha, "g": objective.g_alpha,
            "f_alpha": objective.f_alpha, "g_alpha": objective.g_alpha}[which]


def finite_diff_grad(which, inst: ChannelInstance, x, order: OrderLike, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of ``which`` (``"f"``, ``"g"`` or a callable)."""
    F = _objective(which)
    x = as_point(x)
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (F(inst, x + e, order) - F(inst, x - e, order)) / (2.0 * h)
    return out


def gradient_error(which, inst, x, order, h: float = 1e-6) -> float:
    """Relative 2-norm error between the analytic and finite-difference gradients."""
    analytic = {"f": objective.grad_f_alpha, "g": objective.grad_g_alpha}[which](inst, x, order)
    fd = finite_diff_grad(which, inst, x, order, h)
    return float(np.linalg.norm(analytic - fd) / np.linalg.norm(fd))


def _tilted_rows(inst: ChannelInstance, x: np.ndarray, alpha: float) -> np.ndarray:
    # q_m = p_m**a * x**(1-a) / <p_m**a, x**(1-a)>, one row per channel row
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(inst.rows > 0, alpha * inst.log_rows + (1 - alpha) * np.log(x), -np.inf)
    terms -= terms.max(axis=1, keepdims=True)
    q = np.exp(terms)
    return q / q.sum(axis=1, keepdims=True)


def curvature_terms(inst: ChannelInstance, x, y, t: float, order: OrderLike) -> tuple[float, float]:
    """The two non-negative terms of ``d^2/dt^2 f(gamma(t))`` along the geodesic x -> y.

    Returns ``(Q1, Q2)`` with ``Q1 = E_p <q, l>**2`` and ``Q2 = E_p <q, l**2>``
    where ``l = log(y / x)`` and ``q`` is the tilted row at ``gamma(t)``; the
    second derivative equals ``(1 - alpha) * (Q1 - Q2)``.
    """
    a = as_order(order).alpha
    gam = geodesic_point(x, y, t)
    ell = np.log(np.asarray(y, float) / np.asarray(x, float))
    q = _tilted_rows(inst, gam, a)
    q1 = math.fsum(inst.weights * (q @ ell) ** 2)
    q2 = math.fsum(inst.weights * (q @ (ell * ell)))
    return q1, q2


def smoothness_probe(inst: ChannelInstance, x, y, order: OrderLike, samples: int = 101,
                     rtol: float = 1e-4, atol: float = 1e-9, qtol: float = 1e-12,
                     check_g: bool | None = None) -> ProbeReport:
    """Check the geodesic smoothness bounds on one geodesic.

    Second differences of ``f`` along the geodesic must stay within
    ``|1-alpha| d^2 (1+rtol) + atol``; those of ``g`` (only when both ends lie
    in the unit box) within ``(|1-alpha|+1) d^2 (1+rtol) + atol``.  The two
    curvature terms must lie in ``[-qtol, d^2 + atol]`` at every grid point.

    ``worst_violation`` is the largest ratio of a measured excess to its
    tolerance, so the report passes iff it is at most 1.
    """
    order = as_order(order)
    x = as_point(x)
    y = as_point(y, "y")
    if check_g is None:
        check_g = bool(np.all(x <= 1.0) and np.all(y <= 1.0))
    d2 = poincare_dist(x, y) ** 2
    L = abs(1.0 - order.alpha)
    ts = np.linspace(0.0, 1.0, samples)
    pts = [geodesic_point(x, y, float(t)) for t in ts]
    phi_f = np.array([objective.f_alpha(inst, p, order) for p in pts])
    worst = -math.inf

    def excess(value, bound, tol):
        nonlocal worst
        worst = max(worst, (value - bound) / tol)

    if samples >= 3:
        h = ts[1] - ts[0]
        d2f = np.abs(phi_f[2:] - 2 * phi_f[1:-1] + phi_f[:-2]) / h**2
        excess(d2f.max(), L * d2, rtol * L * d2 + atol)
        if check_g:
            phi_g = phi_f + np.array([p.sum() for p in pts])
            d2g = np.abs(phi_g[2:] - 2 * phi_g[1:-1] + phi_g[:-2]) / h**2
            excess(d2g.max(), (L + 1) * d2, rtol * (L + 1) * d2 + atol)
    for t in ts:
        q1, q2 = curvature_terms(inst, x, y, float(t), order)
        for q in (q1, q2):
            excess(-q, 0.0, qtol)
            excess(q, d2, atol)
    return ProbeReport(f"smoothness[alpha={order.alpha:g}]", samples, worst, 1.0)


def _simplex_points(n: int, lo: np.ndarray, hi: np.ndarray, res: int) -> np.ndarray:
    # grid over the first n-1 barycentric coordinates inside [lo, hi], clipped to the simplex
    axes = [np.linspace(lo[k], hi[k], res + 1) for k in range(n - 1)]
    mesh = np.meshgrid(*axes, indexing="ij")
    head = np.stack([m.ravel() for m in mesh], axis=1)
    last = 1.0 - head.sum(axis=1)
    keep = last >= -1e-15
    pts = np.concatenate([head[keep], np.maximum(last[keep], 0.0)[:, None]], axis=1)
    return pts


def f_alpha_batch(inst: ChannelInstance, X: np.ndarray, order: OrderLike) -> np.ndarray:
    """Vectorised ``f_alpha`` at the rows of ``X`` (boundary points allowed)."""
    a = as_order(order).alpha
    X = np.asarray(X, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logX = np.log(X)
        if a == 1.0:
            marg = inst.weights @ inst.rows
            neg_ent = sum(w * np.sum(p[p > 0] * np.log(p[p > 0]))
                          for w, p in zip(inst.weights, inst.rows))
            supp = marg > 0
            cross = logX[:, supp] @ marg[supp]
            return neg_ent - cross
        out = np.zeros(X.shape[0])
        for w, p, lp in zip(inst.weights, inst.rows, inst.log_rows):
            if w == 0:
                continue
            supp = p > 0
            terms = a * lp[supp] + (1 - a) * logX[:, supp]
            mx = terms.max(axis=1)
            safe = np.where(np.isfinite(mx), mx, 0.0)
            lse = safe + np.log(np.exp(terms - safe[:, None]).sum(axis=1))
            lse = np.where(np.isfinite(mx), lse, mx)
            # x vanishing on the support gives +inf on either side of a = 1
            out += w * (lse / (a - 1))
    return out


def grid_oracle(inst: ChannelInstance, order: OrderLike, resolution: int = 2000,
                rounds: int = 3, zoom: float = 10.0) -> tuple[np.ndarray, float]:
    """Brute-force minimiser of ``f_alpha`` over the simplex for ``N`` in {2, 3}.

    A uniform grid with ``resolution`` cells per coordinate is followed by
    ``rounds`` refinements, each shrinking the search window by ``zoom``
    around the incumbent.
    """
    n = inst.N
    if n not in (2, 3):
        raise NotImplementedError("grid_oracle supports N = 2 or N = 3 only")
    lo = np.zeros(n - 1)
    hi = np.ones(n - 1)
    best_x, best_v = None, math.inf
    half = 0.5
    for r in range(rounds + 1):
        pts = _simplex_points(n, lo, hi, resolution)
        vals = np.concatenate([f_alpha_batch(inst, chunk, order)
                               for chunk in np.array_split(pts, max(1, len(pts) // 200_000))])
        k = int(np.argmin(vals))
        if vals[k] <= best_v:
            best_x, best_v = pts[k], float(vals[k])
        half /= zoom
        centre = best_x[: n - 1]
        lo = np.clip(centre - half, 0.0, 1.0)
        hi = np.clip(centre + half, 0.0, 1.0)
    return best_x, best_v


def riesz_probe(x, egrad, trials: int = 1000, seed=0, rtol: float = 1e-12) -> ProbeReport:
    """Check ``<x^2 egrad, v>_x == <egrad, v>`` for random directions ``v``.

    The error is measured relative to ``sum |egrad_i v_i|`` so that
    cancellation in the pairing does not inflate it.
    """
    x = as_point(x)
    egrad = np.asarray(egrad, dtype=float)
    rng = np.random.default_rng(seed)
    rg = riemannian_grad(x, egrad)
    worst = 0.0
    for _ in range(trials):
        v = TangentVector(x, rng.standard_normal(x.size))
        lhs = poincare_inner(rg, v)
        rhs = float(np.dot(egrad, v.direction))
        scale = float(np.abs(egrad * v.direction).sum())
        if scale > 0:
            worst = max(worst, abs(lhs - rhs) / scale)
        else:
            worst = max(worst, abs(lhs - rhs))
    return ProbeReport("riesz", trials, worst, rtol)


@dataclass(frozen=True)
class SuiteConfig:
    """Sample counts and thresholds for :func:`run_invariant_suite`."""

    gradient_points: int = 10
    fd_step: float = 1e-6
    gradient_rtol: float = 1e-6
    image_points: int = 50
    image_tol: float = 1e-12
    riesz_trials: int = 200
    riesz_rtol: float = 1e-12
    smoothness_pairs: int = 10
    smoothness_samples: int = 41
    smoothness_rtol: float = 1e-4
    smoothness_atol: float = 1e-9
    ray_points: int = 20
    ray_grid: tuple = tuple(np.round(np.arange(0.25, 4.0001, 0.25), 2))
    ray_tol: float = 1e-12
    chord_points: int = 50
    chord_tol: float = 1e-12
    renyi_points: int = 50
    renyi_tol: float = 1e-12
    rgd_iters: int = 500
    box_tol: float = 1e-12
    descent_tol: float = 1e-12
    decrease_tol: float = 1e-10
    coord_low: float = 0.01


def _rand_simplex(rng, n):
    e = rng.standard_exponential(n)
    return e / e.sum()


def _probe_gradient(which, inst, order, rng, cfg):
    worst = 0.0
    for _ in range(cfg.gradient_points):
        x = rng.uniform(cfg.coord_low, 1.0, inst.N)
        worst = max(worst, gradient_error(which, inst, x, order, cfg.fd_step))
    return worst, cfg.gradient_points, cfg.gradient_rtol


def _probe_image(inst, order, rng, cfg):
    worst = 0.0
    for _ in range(cfg.image_points):
        x = rng.uniform(cfg.coord_low, 1.0, inst.N)
        img = -x * objective.grad_f_alpha(inst, x, order)
        worst = max(worst, abs(math.fsum(img) - 1.0), float(-img.min()))
    return worst, cfg.image_points, cfg.image_tol


def _probe_riesz(inst, order, rng, cfg):
    x = rng.uniform(cfg.coord_low, 1.0, inst.N)
    rep = riesz_probe(x, objective.grad_f_alpha(inst, x, order), cfg.riesz_trials,
                      seed=rng.integers(2**63), rtol=cfg.riesz_rtol)
    return rep.worst_violation, rep.samples, rep.threshold


def _probe_smoothness(inst, order, rng, cfg):
    worst = -math.inf
    for _ in range(cfg.smoothness_pairs):
        x = rng.uniform(cfg.coord_low, 1.0, inst.N)
        y = rng.uniform(cfg.coord_low, 1.0, inst.N)
        rep = smoothness_probe(inst, x, y, order, cfg.smoothness_samples,
                               cfg.smoothness_rtol, cfg.smoothness_atol)
        worst = max(worst, rep.worst_violation)
    return worst, cfg.smoothness_pairs, 1.0


def _probe_ray(inst, order, rng, cfg):
    worst = -math.inf
    for _ in range(cfg.ray_points):
        y = _rand_simplex(rng, inst.N)
        at_one = objective.g_alpha(inst, y, order)
        others = min(objective.g_alpha(inst, lam * y, order) for lam in cfg.ray_grid if lam != 1.0)
        worst = max(worst, at_one - others)
    return worst, cfg.ray_points, cfg.ray_tol


def _probe_chord(inst, order, rng, cfg):
    worst = -math.inf
    for _ in range(cfg.chord_points):
        x = rng.uniform(cfg.coord_low, 1.0, inst.N)
        y = rng.uniform(cfg.coord_low, 1.0, inst.N)
        mid = objective.g_alpha(inst, 0.5 * (x + y), order)
        worst = max(worst, mid - 0.5 * (objective.g_alpha(inst, x, order)
                                        + objective.g_alpha(inst, y, order)))
    return worst, cfg.chord_points, cfg.chord_tol


def _probe_renyi(inst, order, rng, cfg):
    worst = -math.inf
    for _ in range(cfg.renyi_points):
        q = _rand_simplex(rng, inst.N)
        p = inst.rows[rng.integers(inst.M)]
        worst = max(worst, -objective.renyi_divergence(p, q, order))
    return worst, cfg.renyi_points, cfg.renyi_tol


def _descent_run(inst, order, cfg):
    res = rgd_solve(inst, SolverConfig(order, max_iters=cfg.rgd_iters, grad_tol=0.0))
    return res


def _probe_box(inst, order, rng, cfg, run):
    worst = max(float(x.max()) for x in run.iterates) - 1.0
    return worst, len(run.iterates), cfg.box_tol


def _probe_descent(inst, order, rng, cfg, run):
    g = np.array([r.g_value for r in run.trace])
    worst = float(np.max(g[1:] - g[:-1])) if g.size > 1 else -math.inf
    return worst, g.size, cfg.descent_tol


def _probe_decrease(inst, order, rng, cfg, run):
    L = as_order(order).smoothness
    g = np.array([r.g_value for r in run.trace])
    rg = np.array([r.rgrad_norm for r in run.trace])
    if g.size < 2:
        return -math.inf, g.size, cfg.decrease_tol
    shortfall = rg[:-1] ** 2 / (2 * L) - (g[:-1] - g[1:])
    return float(shortfall.max()), g.size - 1, cfg.decrease_tol


_STATIC_PROBES = [
    ("gradient-f", lambda *a: _probe_gradient("f", *a)),
    ("gradient-g", lambda *a: _probe_gradient("g", *a)),
    ("simplex-image", _probe_image),
    ("riesz", _probe_riesz),
    ("smoothness", _probe_smoothness),
    ("ray-minimality", _probe_ray),
    ("convexity-chord", _probe_chord),
    ("renyi-nonnegative", _probe_renyi),
]
_RUN_PROBES = [
    ("remain-in-box", _probe_box),
    ("monotone-descent", _probe_descent),
    ("sufficient-decrease", _probe_decrease),
]


def run_invariant_suite(inst: ChannelInstance, orders: Sequence[OrderLike], seed: int = 0,
                        config: SuiteConfig | None = None) -> list[ProbeReport]:
    """Run every lemma-level probe for each order; one report per (probe, order).

    Each probe draws from its own stream keyed by ``(seed, order index,
    probe index)``, so results do not depend on which other probes ran.
    """
    cfg = config or SuiteConfig()
    reports = []
    for oi, order in enumerate(orders):
        order = as_order(order)
        tag = f"[alpha={order.alpha:g}]"
        for pi, (name, probe) in enumerate(_STATIC_PROBES):
            rng = np.random.default_rng([seed, oi, pi])
            worst, n, thr = probe(inst, order, rng, cfg)
            reports.append(ProbeReport(name + tag, n, float(worst), thr))
        run = _descent_run(inst, order, cfg)
        for pj, (name, probe) in enumerate(_RUN_PROBES):
            rng = np.random.default_rng([seed, oi, len(_STATIC_PROBES) + pj])
            worst, n, thr = probe(inst, order, rng, cfg, run)
            reports.append(ProbeReport(name + tag, n, float(worst), thr))
    return reports
