"""
How squeezing scales with optical depth
=======================================

Dissipation alone gives V ~ 2/sqrt(d); a QND measurement gives sqrt(1/d),
twice as good; measuring at the best angle gives V ~ 2/d.  A small
reflectivity epsilon on a second detector keeps the antisqueezed variance
finite, and beyond d* = 1/epsilon the conditional optimum falls back to an
inverse square root law.
"""

import math

import numpy as np

from gaussqueeze import (InteractionParams, conditional_steady, d_star,
                         theta_opt_conditional, theta_opt_unconditional)

eps = 0.005
print(f"{'d':>8} {'V_u^opt':>10} {'V_QND':>10} {'V_c^opt':>10} {'U_c^opt':>10}  ratios")
for d in np.geomspace(10, 1e5, 9):
    vu = theta_opt_unconditional(d).v_opt
    vq = conditional_steady(InteractionParams(0.0, d)).v_squeezed
    rc = theta_opt_conditional(d, epsilon=eps)
    print(f"{d:8.0f} {vu:10.3e} {vq:10.3e} {rc.v_opt:10.3e} {rc.u_at_opt:10.3e}"
          f"  V_u/V_QND={vu / vq:.3f}  V_c d/2={rc.v_opt * d / 2:.2f}")

ds = d_star(0.0, eps)
print(f"\ncrossover depth d* = {ds:g}; sqrt(2)/epsilon = {math.sqrt(2) / eps:.0f}")
for d in (ds, 10 * ds, 100 * ds):
    rc = theta_opt_conditional(d, epsilon=eps)
    print(f"d = {d:7.0f}: U_c = {rc.u_at_opt:8.1f}, V_c / 2 sqrt(eps/d) = "
          f"{rc.v_opt / (2 * math.sqrt(eps / d)):.3f}")
