"""Order-alpha Augustin information by Riemannian gradient descent under the Poincare metric."""
from .geometry import (TangentVector, geodesic_point, poincare_dist, poincare_exp, poincare_inner,
                       poincare_log, riemannian_grad)
from .instances import gen_instance, parse_instance, write_instance
from .objective import (ChannelInstance, Order, f_alpha, g_alpha, grad_f_alpha, grad_g_alpha,
                        order1_solution, renyi_divergence, tilted_mean)
from .solvers import (SolveResult, SolverConfig, certificate, fixed_point_solve, fixed_point_step,
                      normalize, rgd_solve, rgd_step)
from .validation import (ProbeReport, finite_diff_grad, grid_oracle, riesz_probe,
                         run_invariant_suite, smoothness_probe)

__version__ = "0.1.0"
