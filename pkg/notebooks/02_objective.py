"""
Renyi divergences and the Augustin objective
============================================

For a channel with rows ``p_m`` and prior weights ``w_m`` the order-alpha
objective is ``f(x) = sum_m w_m D_alpha(p_m || x)``.  Its minimum over the
simplex is the order-alpha Augustin information.
"""

# %%
import numpy as np

from augustin import (ChannelInstance, f_alpha, g_alpha, gen_instance, grad_f_alpha, order1_solution,
                      renyi_divergence)

p = np.array([0.3, 0.7])
q = np.array([0.6, 0.4])
for a in (0.5, 0.999, 1.0, 1.001, 3.0):
    print(f"D_{a}(p || q) = {renyi_divergence(p, q, a):.8f}")

# %%
# a noiseless binary channel carries exactly one bit (log 2 nats) at every order
sym = ChannelInstance([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]])
print([f_alpha(sym, [0.5, 0.5], a) for a in (0.5, 2.0, 3.0)], np.log(2))

# %%
inst = gen_instance(256, 8, seed=0)
x = np.full(8, 1 / 8)

# the relaxation g adds the total mass, and off the simplex f(c y) = f(y) - log c
print(g_alpha(inst, x, 3.0) - f_alpha(inst, x, 3.0), x.sum())
print(f_alpha(inst, 2 * x, 3.0), f_alpha(inst, x, 3.0) - np.log(2))

# %%
# x * (-grad f(x)) is always a probability vector; it is also the fixed-point map
img = -x * grad_f_alpha(inst, x, 3.0)
print("image sums to", img.sum())

# %%
# at order 1 the optimum is the output marginal and the value is mutual information
marginal, info = order1_solution(inst)
print("I(X;Y) =", info)
