"""Optimal interaction angles, stability boundary and critical occupations.

All quantities depend on the optical depth ``d = g/gamma`` only.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy import optimize

from .single_mode import uc_of_theta, uu_of_theta, vc_of_theta, vu_of_theta

__all__ = [
    "OptimumReport", "CriticalOccupation", "theta_critical",
    "theta_opt_unconditional", "theta_opt_conditional", "conditional_cubic",
    "scan_argmin", "critical_occupation", "d_star",
]

log = logging.getLogger(__name__)

_EDGE = 1e-9


@dataclass(frozen=True)
class OptimumReport:
    theta_opt: float
    v_opt: float
    u_at_opt: float
    method: str
    residual: float


@dataclass(frozen=True)
class CriticalOccupation:
    """Numerically determined critical occupation and its large-``d`` series."""

    n: float
    asymptotic: float
    kind: str


def theta_critical(d):
    """Angle below which unconditional dynamics is unstable; ``None`` if ``d < 2``."""
    if d <= 0:
        raise ValueError("optical depth must be positive")
    if d < 2:
        return None
    return -0.5 * math.asin(2.0 / d)


def _dvu_dtheta(theta, d, n):
    num = 2 * n + 1 + d * math.sin(theta) ** 2
    den = 1 + d * math.sin(2 * theta) / 2
    return (d * math.sin(2 * theta) * den - num * d * math.cos(2 * theta)) / den ** 2


def theta_opt_unconditional(d, n=0.0):
    """Closed-form minimiser of the unconditional squeezed variance."""
    m = 2 * n + 1
    root = math.sqrt(m * (m + d) + 1)
    theta = math.atan((root - 1) / (m + d))
    if abs(d - 2) > 1e-6:
        v = 2 * (d * root - d - 2 * m) / (d * d - 4)
    else:
        v = float(vu_of_theta(theta, d, n))
    return OptimumReport(theta, v, float(uu_of_theta(theta, d, n)), "closed_form",
                         abs(_dvu_dtheta(theta, d, n)))


def conditional_cubic(d, n, epsilon):
    """Coefficients (highest power first) of the stationarity cubic in ``x = tan(theta)``.

    Stationary points of the conditional squeezed variance satisfy
    ``2(1-2e)(m+de) x^3 - [4m^2 - e(16n(n+1) - d^2) + dm(1 + 4e - 4e^2)] x^2
    - 2(1-2e)(m-de) x + dm(1-2e)^2 = 0`` with ``m = 2n+1``.
    """
    m, e = 2 * n + 1, epsilon
    return np.array([
        2 * (1 - 2 * e) * (m + d * e),
        -(4 * m * m - e * (16 * n * (n + 1) - d * d) + d * m * (2 - (1 - 2 * e) ** 2)),
        -2 * (1 - 2 * e) * (m - d * e),
        d * m * (1 - 2 * e) ** 2,
    ])


def _dvc_dtheta(theta, d, n, e):
    # implicit differentiation of d(1-e)V^2 + ((1+x^2) - d(1-2e)x)V - (m(1+x^2) + d e x^2) = 0
    x = math.tan(theta)
    v = float(vc_of_theta(theta, d, n, e))
    m = 2 * n + 1
    f_x = (2 * x - d * (1 - 2 * e)) * v - (2 * m * x + 2 * d * e * x)
    f_v = 2 * d * (1 - e) * v + (1 + x * x) - d * (1 - 2 * e) * x
    return -f_x / f_v * (1 + x * x)


def scan_argmin(func, lo, hi, points=20001):
    """Dense grid scan followed by bounded Brent refinement around the best point."""
    grid = np.linspace(lo, hi, points)
    vals = func(grid)
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, points - 1)]
    res = optimize.minimize_scalar(func, bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-13})
    return float(res.x) if res.fun <= vals[i] else float(grid[i])


def theta_opt_conditional(d, n=0.0, epsilon=0.0, agreement=1e-6):
    """Minimiser of the conditional squeezed variance.

    Real roots of :func:`conditional_cubic` are ranked by the variance they
    produce; a dense scan is run independently and must agree to within
    ``agreement`` rad.  On disagreement, or without a real root, the better of
    the two candidates is returned and ``method`` says which one it was.
    """
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    vfun = lambda t: vc_of_theta(t, d, n, epsilon)
    roots = np.roots(conditional_cubic(d, n, epsilon))
    scale = max(1.0, np.max(np.abs(roots), initial=0.0))
    thetas = [math.atan(r.real) for r in roots if abs(r.imag) <= 1e-9 * scale]
    theta_scan = scan_argmin(vfun, -math.pi / 2 + _EDGE, math.pi / 2 - _EDGE)
    if thetas:
        theta, method = min(thetas, key=lambda t: float(vfun(t))), "cubic_root"
        if abs(theta - theta_scan) > agreement:
            log.warning("cubic root %.9g and scan %.9g disagree (d=%g, n=%g, eps=%g)",
                        theta, theta_scan, d, n, epsilon)
            if vfun(theta_scan) < vfun(theta):
                theta, method = theta_scan, "numeric_scan"
    else:
        theta, method = theta_scan, "numeric_scan"
    v = float(vfun(theta))
    return OptimumReport(theta, v, float(uc_of_theta(theta, d, n, epsilon)), method,
                         abs(_dvc_dtheta(theta, d, n, epsilon)))


def _min_conditional_variance(d, n, constrained):
    if constrained:
        tc = theta_critical(d)
        report = theta_opt_conditional(d, n, 0.0)
        if tc is not None and report.theta_opt <= tc:
            # variance decreases towards the boundary: the infimum sits on it
            return float(vc_of_theta(tc, d, n, 0.0))
        return report.v_opt
    return theta_opt_conditional(d, n, 0.0).v_opt


def critical_occupation(d, kind="unconditional", xtol=1e-9):
    """Occupation above which no steady-state squeezing survives.

    ``kind`` is ``"unconditional"`` (closed form), ``"conditional"`` (minimum
    over all angles of the conditional variance at ``epsilon = 0``) or
    ``"conditional_stable"`` (same, restricted to unconditionally stable
    angles).  The conditional kinds are located by bracketing root search of
    ``min_theta V = 1`` in ``n``.
    """
    if kind == "unconditional":
        n_c = d * (math.sqrt(2) - 1) / 4
        return CriticalOccupation(n_c, n_c, kind)
    if kind == "conditional":
        series = 5 * d / 8 - 3 / (80 * d)
        constrained = False
    elif kind == "conditional_stable":
        series = 0.5 + d / 2 - 7 / (16 * d)
        constrained = True
    else:
        raise ValueError(f"unknown kind {kind!r}")
    objective = lambda n: _min_conditional_variance(d, n, constrained) - 1.0
    hi = max(1.0, d)
    while objective(hi) < 0:
        hi *= 2
    n_root = optimize.brentq(objective, 0.0, hi, xtol=xtol, rtol=1e-14)
    return CriticalOccupation(n_root, series, kind)


def d_star(n, epsilon):
    """Optical depth up to which the ``1/d`` conditional scaling survives.

    Near this depth the optimal antisqueezed variance is about ``sqrt(2)/epsilon``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return (2 * n + 1) / epsilon
