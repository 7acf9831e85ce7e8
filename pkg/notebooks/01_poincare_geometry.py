"""
The Poincare metric on the positive orthant
===========================================

Points are strictly positive vectors; a tangent vector ``u`` at ``x`` has
length ``||u / x||``.  Everything has a closed form.
"""

# %%
import numpy as np

from augustin import (TangentVector, geodesic_point, poincare_dist, poincare_exp, poincare_inner,
                      poincare_log, riemannian_grad)

x = np.array([1.0, 4.0])
y = np.array([2.0, 2.0])

# distance is the Euclidean norm of the log-ratio
print("d(x, y)      =", poincare_dist(x, y))
print("sqrt(2) ln 2 =", np.sqrt(2) * np.log(2))

# %%
# log and exp are inverse to each other
v = poincare_log(x, y)
print("log_x(y) =", v.direction, " |v|_x =", v.norm())
print("exp_x(log_x(y)) =", poincare_exp(v))

# %%
# geodesics are coordinate-wise geometric interpolations x^(1-t) y^t,
# traversed at constant speed
for t in (0.0, 0.25, 0.5, 1.0):
    g = geodesic_point(x, y, t)
    print(f"t={t:4}  gamma={g}  d(x, gamma)={poincare_dist(x, g):.6f}")

# %%
# the Riemannian gradient x^2 * egrad pairs with any direction exactly as the
# Euclidean gradient does
rng = np.random.default_rng(0)
egrad = rng.standard_normal(2)
u = TangentVector(x, rng.standard_normal(2))
print(poincare_inner(riemannian_grad(x, egrad), u), np.dot(egrad, u.direction))
