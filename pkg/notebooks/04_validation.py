"""
Lemma-level probes
==================

The validation module checks the analytic pieces against independent oracles:
finite differences, second differences along geodesics, a brute-force grid and
the Riesz pairing.
"""

# %%
import numpy as np

from augustin import (ChannelInstance, Order, SolverConfig, finite_diff_grad, grad_f_alpha, grid_oracle,
                      rgd_solve, run_invariant_suite, smoothness_probe)

rng = np.random.default_rng(1)
rows = rng.dirichlet(np.ones(2), size=3)
inst = ChannelInstance(np.full(3, 1 / 3), rows)

# %%
x = rng.uniform(0.01, 1, 2)
print("analytic:", grad_f_alpha(inst, x, 2.0))
print("central :", finite_diff_grad("f", inst, x, 2.0))

# %%
# along a geodesic the second derivative of f is at most |1 - alpha| d^2
y = rng.uniform(0.01, 1, 2)
print(smoothness_probe(inst, x, y, 2.0))

# %%
# two-symbol optimum by brute force against RGD
xg, vg = grid_oracle(inst, 0.7)
res = rgd_solve(inst, SolverConfig(Order(0.7)))
print("grid", vg, " rgd", res.f_value)

# %%
for rep in run_invariant_suite(inst, [0.5, 3.0], seed=0):
    print("PASS" if rep.passed else "FAIL", rep.name, f"{rep.worst_violation:.2e}")
