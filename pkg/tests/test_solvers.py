import math

import numpy as np
import pytest

from augustin.geometry import poincare_exp, riemannian_grad
from augustin.objective import ChannelInstance, Order, f_alpha, g_alpha, grad_g_alpha
from augustin.solvers import (CONVERGED, DIVERGED, MAX_ITERS, SolverConfig, bound_term, certificate,
                              certificate_curve, fill_bound_terms, fixed_point_solve, fixed_point_step,
                              normalize, reference_optimum, rgd_solve, rgd_step)
from augustin.validation import grid_oracle

from conftest import random_instance


def cfg(a, **kw):
    return SolverConfig(Order(a), **kw)


def test_config_defaults_and_validation():
    c = cfg(3.0)
    assert c.step == pytest.approx(1 / 3)
    assert c.grad_tol == 1e-10 and c.floor == 1e-300 and c.max_iters == 10_000
    assert cfg(3.0, step_override=0.1).step == 0.1
    with pytest.raises(ValueError):
        cfg(3.0, trace_every=0)
    with pytest.raises(ValueError):
        cfg(3.0, step_override=-1.0)


def test_rgd_step_stationary(symmetric):
    x = np.array([0.5, 0.5])
    np.testing.assert_array_equal(rgd_step(symmetric, x, 3.0), x)


def test_rgd_step_moves_towards_optimum(symmetric):
    x = np.array([0.9, 0.1])
    nxt = rgd_step(symmetric, x, 3.0)
    assert f_alpha(symmetric, normalize(nxt), 3.0) < f_alpha(symmetric, normalize(x), 3.0)


def test_rgd_step_matches_geometry_path(rng):
    for a in (0.3, 0.5, 2.0, 3.0, 10.0):
        inst = random_instance(rng, 8, 6)
        x = rng.uniform(0.01, 1, 6)
        rg = riemannian_grad(x, grad_g_alpha(inst, x, a))
        via_geometry = poincare_exp(type(rg)(x, -Order(a).step * rg.direction))
        np.testing.assert_allclose(rgd_step(inst, x, a), via_geometry, rtol=1e-14)


def test_rgd_step_floor_flag():
    inst = ChannelInstance([1.0], [[1.0, 0.0]])
    out, floored = rgd_step(inst, np.array([1.0, 0.9]), 0.5, step=1000.0, full_output=True)
    assert floored and out[1] == 1e-300 and out[0] == 1.0


def test_rgd_single_row(rng):
    p = np.array([0.1, 0.2, 0.3, 0.4])
    inst = ChannelInstance([1.0], [p])
    for a in (0.3, 0.5, 2.0, 3.0):
        res = rgd_solve(inst, cfg(a))
        assert res.status == CONVERGED
        np.testing.assert_allclose(res.normalized_x, p, atol=1e-10)
        assert res.f_value <= 1e-10


def test_rgd_symmetric(symmetric):
    res = rgd_solve(symmetric, cfg(3.0), x1=[0.9, 0.2])
    assert res.converged
    np.testing.assert_allclose(res.normalized_x, [0.5, 0.5], atol=1e-10)
    assert res.f_value == pytest.approx(math.log(2), abs=1e-10)


def test_rgd_matches_grid_oracle(rng):
    inst = random_instance(rng, 3, 2)
    res = rgd_solve(inst, cfg(0.7))
    _, v = grid_oracle(inst, 0.7)
    assert res.converged
    assert abs(res.f_value - v) <= 1e-6


def test_rgd_trace_layout(rng):
    inst = random_instance(rng, 10, 4)
    res = rgd_solve(inst, cfg(2.0, max_iters=25, grad_tol=0.0, trace_every=10))
    assert [r.t for r in res.trace] == [1, 11, 21, 26]
    assert res.status == MAX_ITERS and res.iterations == 25
    assert len(res.iterates) == len(res.trace)
    assert abs(res.normalized_x.sum() - 1) <= 1e-12
    full = rgd_solve(inst, cfg(2.0, max_iters=25, grad_tol=0.0))
    np.testing.assert_array_equal(full.final_x, res.final_x)
    np.testing.assert_array_equal(full.iterates[10], res.iterates[1])


def test_rgd_zero_iterations(rng):
    inst = random_instance(rng, 5, 3)
    res = rgd_solve(inst, cfg(2.0, max_iters=0))
    assert res.iterations == 0 and res.status == MAX_ITERS and len(res.trace) == 1


def test_rgd_rejects_bad_start(rng):
    inst = random_instance(rng, 5, 3)
    with pytest.raises(ValueError):
        rgd_solve(inst, cfg(2.0), x1=[0.5, 0.5, 1.5])
    with pytest.raises(ValueError):
        rgd_solve(inst, cfg(2.0), x1=[0.5, 0.0, 0.5])


def test_rgd_oversized_step_is_diverged(rng):
    inst = random_instance(rng, 20, 8)
    res = rgd_solve(inst, cfg(3.0, step_override=40.0, max_iters=1000))
    assert res.status == DIVERGED
    assert len(res.trace) >= 2


@pytest.mark.parametrize("a", [0.3, 0.5, 2.0, 3.0, 10.0])
def test_box_and_descent(rng, a):
    inst = random_instance(rng, 30, 8)
    res = rgd_solve(inst, cfg(a, max_iters=300, grad_tol=0.0))
    L = Order(a).smoothness
    g = np.array([r.g_value for r in res.trace])
    rg = np.array([r.rgrad_norm for r in res.trace])
    assert max(x.max() for x in res.iterates) <= 1 + 1e-12
    assert np.all(np.diff(g) <= 1e-12)
    assert np.all(g[:-1] - g[1:] >= rg[:-1] ** 2 / (2 * L) - 1e-10)
    for r, x in zip(res.trace, res.iterates):
        assert r.f_bar_value <= r.g_value - 1 + 1e-12
        assert r.f_bar_value == pytest.approx(f_alpha(inst, normalize(x), a), abs=1e-12)


def test_fixed_point_step_examples(symmetric, rng):
    np.testing.assert_allclose(fixed_point_step(symmetric, [0.9, 0.3], 3.0), [0.5, 0.5], rtol=1e-15)
    inst = random_instance(rng, 12, 5)
    res = fixed_point_solve(inst, cfg(0.5, grad_tol=1e-15, max_iters=2000))
    xs = res.normalized_x
    np.testing.assert_allclose(fixed_point_step(inst, xs, 0.5), xs, atol=1e-13)
    for a in (0.5, 3.0):
        assert abs(fixed_point_step(inst, rng.uniform(0.1, 1, 5), a).sum() - 1) <= 1e-12


def test_fixed_point_single_row():
    # a one-hot row is reached in one step for every order
    for a in (0.5, 2.0, 3.0):
        inst = ChannelInstance([1.0], [[0.0, 1.0, 0.0]])
        np.testing.assert_array_equal(fixed_point_step(inst, np.full(3, 1 / 3), a), [0, 1, 0])
    # otherwise the first step lands on p**a normalised and converges to p when a < 1
    p = np.array([0.2, 0.3, 0.5])
    inst = ChannelInstance([1.0], [p])
    np.testing.assert_allclose(fixed_point_step(inst, np.full(3, 1 / 3), 2.0), p**2 / (p**2).sum(), rtol=1e-14)
    res = fixed_point_solve(inst, cfg(0.5, grad_tol=1e-13))
    assert res.converged
    np.testing.assert_allclose(res.normalized_x, p, atol=1e-12)


def test_fixed_point_agrees_with_rgd_below_one(rng):
    inst = random_instance(rng, 64, 8)
    fp = fixed_point_solve(inst, cfg(0.5, max_iters=500, grad_tol=0.0))
    rgd = rgd_solve(inst, cfg(0.5))
    assert rgd.converged
    assert abs(fp.f_value - rgd.f_value) <= 1e-8


def test_fixed_point_diverges_above_one():
    from augustin.instances import gen_instance
    inst = gen_instance(1024, 16, seed=0)
    res = fixed_point_solve(inst, cfg(3.0))
    assert res.status == DIVERGED


def test_fixed_point_trace_every(rng):
    inst = random_instance(rng, 10, 4)
    res = fixed_point_solve(inst, cfg(0.5, max_iters=25, grad_tol=0.0, trace_every=10))
    assert [r.t for r in res.trace] == [1, 11, 21, 26]


def test_certificate_examples(rng):
    xs = rng.uniform(0.1, 1, 5)
    assert certificate([xs] * 4, xs, 3.0, 4) == 0
    assert certificate([xs / 2] * 10, xs, 2.0, 10) == pytest.approx(0.4 * 5, rel=1e-15)
    x = xs.copy()
    x[0] = 1e-300
    assert certificate([x], xs, 2.0, 1) == math.inf
    assert bound_term(xs, xs) == 0
    with pytest.raises(ValueError):
        certificate([xs], xs, 2.0, 0)


def test_certificate_curve_matches_prefixes(rng):
    inst = random_instance(rng, 16, 4)
    res = rgd_solve(inst, cfg(2.0, max_iters=50, grad_tol=0.0))
    ts, curve = certificate_curve(res, res.normalized_x, 2.0)
    for T in (1, 7, 50):
        k = list(ts).index(T)
        assert curve[k] == pytest.approx(res.certificate_at(T, res.normalized_x, 2.0), rel=1e-15)


@pytest.mark.parametrize("a", [0.5, 3.0])
def test_certificate_bounds_gap(rng, a):
    inst = random_instance(rng, 40, 6)
    res = rgd_solve(inst, cfg(a))
    assert res.converged
    x_star, f_star = reference_optimum(inst, a, 10 * res.iterations)
    ts, curve = certificate_curve(res, x_star, a)
    for T, bound in zip(ts[1:-1], curve[1:-1]):
        gap = f_alpha(inst, normalize(res.iterates[T]), a) - f_star
        assert gap <= bound
    assert res.certificate is not None and res.certificate >= 0


def test_fill_bound_terms(rng):
    inst = random_instance(rng, 5, 3)
    res = rgd_solve(inst, cfg(2.0, max_iters=5, grad_tol=0.0))
    assert all(math.isnan(r.bound_term) for r in res.trace)
    filled = fill_bound_terms(res, res.normalized_x)
    assert all(r.bound_term >= 0 for r in filled.trace)
    assert all(math.isnan(r.bound_term) for r in res.trace)


def test_normalize():
    np.testing.assert_array_equal(normalize([2.0, 2.0]), [0.5, 0.5])
    x = np.array([0.2, 0.3, 0.5])
    np.testing.assert_array_equal(normalize(x), x)


def test_determinism(rng):
    inst = random_instance(rng, 50, 6)
    a = rgd_solve(inst, cfg(3.0, max_iters=200))
    b = rgd_solve(inst, cfg(3.0, max_iters=200))
    np.testing.assert_array_equal(a.final_x, b.final_x)
    assert [r.g_value for r in a.trace] == [r.g_value for r in b.trace]


def test_g_of_rgd_iterates_matches_objective(rng):
    inst = random_instance(rng, 9, 5)
    res = rgd_solve(inst, cfg(3.0, max_iters=20, grad_tol=0.0))
    for r, x in zip(res.trace, res.iterates):
        assert r.g_value == pytest.approx(g_alpha(inst, x, 3.0), abs=1e-13)
