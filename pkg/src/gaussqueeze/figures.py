"""Data behind the published variance and optimal-angle figures.

Every function returns a :class:`SweepTable`.  Unconditional curves start at
``theta_c + THETA_MARGIN`` because the dissipative dynamics has no steady
state below the stability angle; conditional curves span the whole open
interval and flag the unconditionally unstable rows instead.
"""

import math

import numpy as np

from .optimize import (critical_occupation, theta_critical, theta_opt_conditional,
                       theta_opt_unconditional)
from .single_mode import InteractionParams, uc_of_theta, uu_of_theta, variance_curves, vc_of_theta, vu_of_theta
from .table import SweepTable

__all__ = ["FIGURES", "THETA_MARGIN", "EDGE", "unconditional_grid", "full_grid",
           "figure_vu", "figure_opt_theta", "figure_vc", "figure_fig5", "figure_fig6",
           "figure_var_od", "make_figure"]

THETA_MARGIN = 1e-4
EDGE = 1e-4

_CURVES = ((5.0, 0.0), (50.0, 0.0), (50.0, None))   # None -> critical occupation


def _occupation(d, n):
    return critical_occupation(d).n if n is None else n


def unconditional_grid(d, points):
    """Angles from just above the stability angle (or -pi/2) to just below pi/2."""
    tc = theta_critical(d)
    lo = -math.pi / 2 + EDGE if tc is None else tc + THETA_MARGIN
    return np.linspace(lo, math.pi / 2 - EDGE, points)


def full_grid(points):
    return np.linspace(-math.pi / 2 + EDGE, math.pi / 2 - EDGE, points)


def _stack(blocks, metadata):
    names = blocks[0].keys()
    return SweepTable({k: np.concatenate([np.asarray(b[k], dtype=float) for b in blocks])
                       for k in names}, metadata)


def figure_vu(points=2001):
    """Unconditional squeezed variance versus angle for the three captioned curves."""
    blocks = []
    for d, n in _CURVES:
        n = _occupation(d, n)
        theta = unconditional_grid(d, points)
        blocks.append({"d": np.full(points, d), "n": np.full(points, n), "theta": theta,
                       "V_u": vu_of_theta(theta, d, n)})
    return _stack(blocks, {"figure": "Vu"})


def figure_opt_theta(points=400, n=0.0, d_min=2.5, d_max=1e4):
    """Optimal angles versus optical depth with their large-depth asymptotes."""
    depth = np.geomspace(d_min, d_max, points)
    th_u = [theta_opt_unconditional(d, n).theta_opt for d in depth]
    th_c = [theta_opt_conditional(d, n, 0.0).theta_opt for d in depth]
    m = 2 * n + 1
    return SweepTable({
        "d": depth,
        "theta_u_opt": th_u,
        "theta_c_opt": th_c,
        "theta_u_asymptote": np.sqrt(m / depth),
        "theta_c_asymptote": -math.pi / 4 + m / depth,
    }, {"figure": "optTheta", "n": n})


def figure_vc(points=2001):
    """Conditional variances at ``epsilon = 0`` for the three captioned curves.

    ``U_c`` is unbounded (``inf``) wherever the row is flagged unstable.
    """
    blocks = []
    theta = full_grid(points)
    for d, n in _CURVES:
        n = _occupation(d, n)
        stable = 1 + d * np.sin(2 * theta) / 2 > 0
        blocks.append({"d": np.full(points, d), "n": np.full(points, n), "theta": theta,
                       "V_c": vc_of_theta(theta, d, n, 0.0),
                       "U_c": uc_of_theta(theta, d, n, 0.0),
                       "stable": stable})
    table = _stack(blocks, {"figure": "Vc", "epsilon": 0.0})
    table.columns["stable"] = table.columns["stable"].astype(int)
    return table


def _theta_panel(d, n, epsilon, points, name):
    table = variance_curves(full_grid(points), InteractionParams(0.0, d, n, epsilon))
    table.metadata["figure"] = name
    return table


def figure_fig5(points=2001):
    """``V_u``, ``V_c`` and ``U_c`` versus angle at ``d = 5``, ``n = 0``, ``epsilon = 0.05``."""
    return _theta_panel(5.0, 0.0, 0.05, points, "fig5")


def figure_fig6(points=2001):
    """As :func:`figure_fig5` at the critical occupation ``n = d(sqrt(2)-1)/4``."""
    return _theta_panel(5.0, critical_occupation(5.0).n, 0.05, points, "fig6")


def figure_var_od(points=201, epsilon=0.01, n=0.0, d_min=1.0, d_max=1e5):
    """Optimised variances versus optical depth, with the dashed asymptotes."""
    depth = np.geomspace(d_min, d_max, points)
    cols = {k: [] for k in ("theta_c_opt", "V_c_opt", "U_c_opt", "theta_u_opt", "V_u_opt", "U_u_opt")}
    for d in depth:
        rep_c = theta_opt_conditional(d, n, epsilon)
        rep_u = theta_opt_unconditional(d, n)
        for key, val in (("theta_c_opt", rep_c.theta_opt), ("V_c_opt", rep_c.v_opt),
                         ("U_c_opt", rep_c.u_at_opt), ("theta_u_opt", rep_u.theta_opt),
                         ("V_u_opt", vu_of_theta(rep_u.theta_opt, d, n)),
                         ("U_u_opt", uu_of_theta(rep_u.theta_opt, d, n))):
            cols[key].append(float(val))
    m = 2 * n + 1
    cols = {"d": depth, **cols,
            "conditional_asymptote": 2 * m / depth,
            "unconditional_asymptote": 2 * np.sqrt(m / depth),
            "antisqueezing_asymptote": np.full(points, 1 / epsilon)}
    return SweepTable(cols, {"figure": "varOD", "epsilon": epsilon, "n": n})


FIGURES = {
    "Vu": figure_vu,
    "optTheta": figure_opt_theta,
    "Vc": figure_vc,
    "fig5": figure_fig5,
    "fig6": figure_fig6,
    "varOD": figure_var_od,
}


def make_figure(which, points=None, **kwargs):
    """Build the table for figure key ``which`` (see :data:`FIGURES`)."""
    if which not in FIGURES:
        raise ValueError(f"unknown figure {which!r}; choose from {sorted(FIGURES)}")
    if points is not None:
        kwargs["points"] = points
    return FIGURES[which](**kwargs)
