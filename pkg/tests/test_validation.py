import math

import numpy as np
import pytest

from augustin import objective
from augustin.objective import ChannelInstance
from augustin.validation import (ProbeReport, SuiteConfig, curvature_terms, f_alpha_batch, finite_diff_grad,
                                 grid_oracle, riesz_probe, run_invariant_suite, smoothness_probe)

from conftest import random_instance

SMALL = SuiteConfig(gradient_points=3, image_points=10, riesz_trials=20, smoothness_pairs=2,
                    smoothness_samples=21, ray_points=5, chord_points=10, renyi_points=10, rgd_iters=50)


def test_probe_report():
    assert ProbeReport("a", 1, 0.5, 0.5).passed
    assert not ProbeReport("a", 1, 0.6, 0.5).passed
    assert ProbeReport("a", 1, 0.5, 0.5).as_dict()["pass"] is True


def test_finite_diff_examples(rng, symmetric):
    inst = random_instance(rng, 3, 4)
    x = rng.uniform(0.1, 1, 4)
    linear = lambda _inst, z, _a: float(np.sum(z))
    np.testing.assert_allclose(finite_diff_grad(linear, inst, x, 2.0), 1.0, atol=1e-9)
    xs = np.array([0.5, 0.5])
    np.testing.assert_allclose(xs * finite_diff_grad("g", symmetric, xs, 3.0), 0, atol=1e-8)


def test_smoothness_probe_examples(rng):
    inst = random_instance(rng, 4, 3)
    x = rng.uniform(0.1, 1, 3)
    assert smoothness_probe(inst, x, x, 2.0).passed
    single = ChannelInstance([1.0], [[0.5, 0.5]])
    x, y = np.array([0.4, 0.6]), np.array([0.6, 0.4])
    d2 = np.sum(np.log(y / x) ** 2)
    assert smoothness_probe(single, x, y, 2.0, atol=1e-6 * d2).passed


def test_curvature_terms_at_start(rng):
    inst = random_instance(rng, 5, 4, zero_frac=0.3)
    x, y = rng.uniform(0.05, 1, 4), rng.uniform(0.05, 1, 4)
    a = 2.5
    ell = np.log(y / x)
    q1 = q2 = 0.0
    for w, p in zip(inst.weights, inst.rows):
        num = np.array([pi**a * xi ** (1 - a) if pi > 0 else 0.0 for pi, xi in zip(p, x)])
        q = num / num.sum()
        q1 += w * float(q @ ell) ** 2
        q2 += w * float(q @ ell**2)
    got1, got2 = curvature_terms(inst, x, y, 0.0, a)
    assert got1 == pytest.approx(q1, rel=1e-12)
    assert got2 == pytest.approx(q2, rel=1e-12)
    d2 = float(ell @ ell)
    assert 0 <= got1 <= d2 and 0 <= got2 <= d2


def test_second_derivative_identity(rng):
    # (1 - a)(Q1 - Q2) is the exact second derivative along the geodesic
    inst = random_instance(rng, 6, 4)
    x, y = rng.uniform(0.1, 1, 4), rng.uniform(0.1, 1, 4)
    a, t, h = 3.0, 0.4, 1e-4
    from augustin.geometry import geodesic_point
    phi = [objective.f_alpha(inst, geodesic_point(x, y, s), a) for s in (t - h, t, t + h)]
    fd = (phi[0] - 2 * phi[1] + phi[2]) / h**2
    q1, q2 = curvature_terms(inst, x, y, t, a)
    assert fd == pytest.approx((1 - a) * (q1 - q2), rel=1e-5, abs=1e-7)


def test_smoothness_probe_detects_extra_curvature(rng, monkeypatch):
    inst = random_instance(rng, 6, 4)
    x, y = rng.uniform(0.05, 1, 4), rng.uniform(0.05, 1, 4)
    assert smoothness_probe(inst, x, y, 2.0).passed
    good = objective.f_alpha
    # add 5 * (sum log x)**2, whose geodesic curvature exceeds the |1 - alpha| d^2 bound
    monkeypatch.setattr(objective, "f_alpha", lambda i, z, a: good(i, z, a) + 5 * np.sum(np.log(z)) ** 2)
    assert not smoothness_probe(inst, x, y, 2.0).passed


def test_grid_oracle_examples(symmetric):
    x, v = grid_oracle(symmetric, 3.0)
    np.testing.assert_allclose(x, [0.5, 0.5], atol=1e-9)
    assert v == pytest.approx(math.log(2), abs=1e-12)
    p = np.array([0.3, 0.7])
    x, v = grid_oracle(ChannelInstance([1.0], [p]), 2.0)
    np.testing.assert_allclose(x, p, atol=1e-6)
    assert abs(v) <= 1e-10
    with pytest.raises(NotImplementedError):
        grid_oracle(ChannelInstance([1.0], [[0.25] * 4]), 2.0)


def test_grid_oracle_three_symbols(rng):
    inst = random_instance(rng, 4, 3)
    x, v = grid_oracle(inst, 0.5, resolution=300)
    from augustin.solvers import SolverConfig, rgd_solve
    res = rgd_solve(inst, SolverConfig(0.5))
    assert abs(res.f_value - v) <= 1e-6


def test_grid_oracle_refinement_is_monotone(rng):
    inst = random_instance(rng, 3, 2)
    _, coarse = grid_oracle(inst, 0.7, resolution=500)
    _, fine = grid_oracle(inst, 0.7, resolution=1000)
    assert fine <= coarse + 1e-9


def test_f_alpha_batch_matches_scalar(rng):
    inst = random_instance(rng, 5, 3, zero_frac=0.3)
    X = np.stack([rng.dirichlet(np.ones(3)) for _ in range(20)])
    for a in (0.5, 1.0, 3.0):
        got = f_alpha_batch(inst, X, a)
        want = [objective.f_alpha(inst, x, a) for x in X]
        np.testing.assert_allclose(got, want, rtol=1e-12)


def test_riesz_examples(rng):
    x = rng.uniform(0.1, 1, 8)
    assert riesz_probe(x, np.zeros(8), trials=10).worst_violation == 0
    assert riesz_probe(np.ones(8), rng.standard_normal(8), trials=10).worst_violation == 0
    assert riesz_probe(x, rng.standard_normal(8), trials=1000).passed


def test_suite_passes_and_is_deterministic(rng):
    inst = random_instance(rng, 12, 5)
    orders = [0.5, 1.0, 3.0]
    reports = run_invariant_suite(inst, orders, seed=7, config=SMALL)
    failed = [r for r in reports if not r.passed]
    assert not failed, failed
    assert len(reports) == 11 * len(orders)
    again = run_invariant_suite(inst, orders, seed=7, config=SMALL)
    assert reports == again


def test_suite_empty_order_list(rng):
    assert run_invariant_suite(random_instance(rng, 3, 3), []) == []


def test_suite_catches_sign_flip(rng, monkeypatch):
    inst = random_instance(rng, 12, 5)
    good = objective.grad_f_alpha
    monkeypatch.setattr(objective, "grad_f_alpha", lambda *a: -good(*a))
    reports = {r.name: r for r in run_invariant_suite(inst, [2.0], seed=1, config=SMALL)}
    assert not reports["gradient-f[alpha=2]"].passed
