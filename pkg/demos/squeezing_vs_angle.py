"""
Squeezing versus interaction angle
==================================

A single ensemble at optical depth d = 5 is probed by light whose coupling
mixes the QND (theta = 0), beam-splitter (theta = pi/4) and two-mode
squeezing (theta = -pi/4) interactions.  Without measurement the light
carries the atoms into a squeezed steady state; watching the light with a
homodyne detector squeezes them further.
"""

import math

import numpy as np

from gaussqueeze import (InteractionParams, theta_critical, theta_opt_conditional,
                         theta_opt_unconditional, variance_curves)

d = 5.0
tc = theta_critical(d)
print(f"d = {d:g}: the dissipative dynamics is unstable below theta_c = {tc:.4f} rad\n")

# a coarse table; stable = 0 marks angles with no unconditional steady state
table = variance_curves(np.linspace(-1.2, 1.2, 13), InteractionParams(0.0, d, 0.0, 0.05))
c = table.columns
print(f"{'theta':>7} {'V_u':>8} {'V_c':>8} {'U_c':>8} stable")
for row in zip(c["theta"], c["V_u"], c["V_c"], c["U_c"], c["stable"]):
    print("{:7.3f} {:8.4f} {:8.4f} {:8.3f} {:>5d}".format(*row[:4], int(row[4])))

# the two optima; measuring beats pure dissipation
u = theta_opt_unconditional(d)
k = theta_opt_conditional(d, epsilon=0.05)
print(f"\nunconditional optimum: theta = {u.theta_opt:.4f}, V = {u.v_opt:.4f} "
      f"({-10 * math.log10(u.v_opt):.2f} dB)")
print(f"conditional optimum:   theta = {k.theta_opt:.4f}, V = {k.v_opt:.4f} "
      f"({-10 * math.log10(k.v_opt):.2f} dB), U = {k.u_at_opt:.2f}")
