"""
Riemannian gradient descent versus the fixed-point iteration
=============================================================

RGD under the Poincare metric with step ``1 / (|1 - alpha| + 1)`` converges for
every order.  The fixed-point map ``x -> x * -grad f(x)`` is only reliable
below order 1.  Above it, it oscillates, and the solver reports the run as
diverged.
"""

# %%
import numpy as np

from augustin import Order, SolverConfig, fixed_point_solve, gen_instance, rgd_solve
from augustin.solvers import certificate_curve, reference_optimum

inst = gen_instance(1024, 16, seed=0)

for a in (0.5, 3.0):
    cfg = SolverConfig(Order(a))
    rgd = rgd_solve(inst, cfg)
    fp = fixed_point_solve(inst, cfg)
    print(f"alpha={a}: rgd {rgd.status} after {rgd.iterations} steps, f={rgd.f_value:.12f}")
    print(f"          fixed point {fp.status} after {fp.iterations} steps, f={fp.f_value:.12f}")

# %%
# the ex-post certificate 2L/T max_t ||x*/x_t - 1||^2 bounds the optimality gap
# of the normalised iterate
a = 3.0
res = rgd_solve(inst, SolverConfig(Order(a)))
x_star, f_star = reference_optimum(inst, a, 10 * res.iterations)
ts, bound = certificate_curve(res, x_star, a)
gap = np.array([r.f_bar_value for r in res.trace]) - f_star
for T in (1, 10, 100, res.iterations):
    print(f"T={T:5d}  gap={gap[T]:.3e}  certificate={bound[T - 1]:.3e}")

# %%
# g decreases monotonically and the iterates never leave the unit box
g = np.array([r.g_value for r in res.trace])
print("largest rise in g:", np.diff(g).max(), " largest coordinate:", max(x.max() for x in res.iterates))

# %%
# optional plot of the convergence curves
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots()
    ax.loglog(ts[1:], np.maximum(gap[1:len(ts)], 1e-17), label="f(x_bar) - f*")
    ax.loglog(ts[1:], bound[1:], label="certificate")
    ax.set_xlabel("T")
    ax.legend()
    fig.savefig("convergence.png", dpi=100)
