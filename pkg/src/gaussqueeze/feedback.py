"""Markovian homodyne feedback that turns conditional squeezing unconditional.

The photocurrents of the two detectors drive the Hamiltonians ``xi1 I_1 P``
and ``xi2 I_2 X``.  Averaged over records the oscillator obeys a Lyapunov
equation whose steady state depends on the gains.
"""

from dataclasses import dataclass
import math

import numpy as np

from .engine import SystemSpec
from .errors import FeedbackUnstable, NotStabilizable
from .single_mode import SteadyResult, conditional_steady, probe_spec

__all__ = ["FeedbackGains", "feedback_steady", "optimal_gains", "feedback_spec"]


@dataclass(frozen=True)
class FeedbackGains:
    """Gains on ``F1 = xi1 P`` and ``F2 = xi2 X``.

    ``residual`` is the largest mismatch with the conditional variances when the
    gains come from :func:`optimal_gains` (0 otherwise).
    """

    xi1: float
    xi2: float
    residual: float = 0.0


def _rates(params):
    if params.phi != 0.0:
        raise ValueError("feedback formulas assume phi=0")
    g, eps = params.g, params.epsilon
    return (math.sqrt(2 * g * (1 - eps)), math.sqrt(2 * g * eps),
            params.gamma + g * params.alpha * params.beta)


def feedback_steady(params, gains):
    """Steady variances under feedback with the given gains."""
    k1, k2, base = _rates(params)
    g, gam, n = params.g, params.gamma, params.n
    a, b = params.alpha, params.beta
    x1, x2 = gains.xi1, gains.xi2
    rate_v = base - 2 * a * x1 * k1
    rate_u = base - 2 * b * x2 * k2
    if rate_v <= 0 or rate_u <= 0:
        raise FeedbackUnstable(f"effective decay rates ({rate_v:.3g}, {rate_u:.3g}) not positive")
    v = (gam * (2 * n + 1) + g * b * b - 2 * b * x1 * k1 + 2 * x1 * x1) / rate_v
    u = (gam * (2 * n + 1) + g * a * a - 2 * a * x2 * k2 + 2 * x2 * x2) / rate_u
    return SteadyResult(v, u)


def _best_gain(coupling, k, base, const, other):
    """Minimise ``(const - 2 other k xi + 2 xi^2)/(base - 2 coupling k xi)``.

    Stationarity gives ``2 coupling k xi^2 - 2 base xi - k(coupling const - other base) = 0``;
    the admissible root leaves the denominator equal to ``+sqrt(disc)``.  It is
    written in rationalised form so that ``coupling -> 0`` (constant
    denominator, gain ``other k / 2``) needs no special case.
    """
    disc = base * base + 2 * k * k * coupling * (coupling * const - other * base)
    root = math.sqrt(disc) if disc > 0 else 0.0
    if disc <= 0 or base + root <= 0:
        return None
    return k * (other * base - coupling * const) / (base + root)


def optimal_gains(params, check_tol=1e-8):
    """Gains minimising each feedback variance.

    The optimum reproduces the conditional steady variances; the mismatch is
    checked against ``check_tol`` (relative) and stored in ``residual``.

    Raises
    ------
    NotStabilizable
        If either quadrature cannot be given a positive effective decay rate.
    """
    k1, k2, base = _rates(params)
    g, gam, n = params.g, params.gamma, params.n
    a, b = params.alpha, params.beta
    xi1 = _best_gain(a, k1, base, gam * (2 * n + 1) + g * b * b, b)
    xi2 = _best_gain(b, k2, base, gam * (2 * n + 1) + g * a * a, a)
    if xi1 is None or xi2 is None:
        which = "X" if xi1 is None else "P"
        raise NotStabilizable(f"no stabilising gain for the {which} quadrature "
                              f"(theta={params.theta:.6g}, epsilon={params.epsilon:g})")
    fb = feedback_steady(params, FeedbackGains(xi1, xi2))
    cond = conditional_steady(params, strict=False)
    residual = max(abs(fb.v_squeezed - cond.v_squeezed) / cond.v_squeezed,
                   abs(fb.u_antisqueezed - cond.u_antisqueezed) / cond.u_antisqueezed)
    if not residual <= check_tol:
        raise AssertionError(f"feedback variances differ from conditional ones by {residual:.3g}")
    return FeedbackGains(xi1, xi2, residual)


def _bilinear_to_matrix(kernel):
    # H = r^T K r  ->  M with H = r^T M r / 2 (antisymmetric parts are c-numbers)
    sym = kernel + kernel.T
    if np.max(np.abs(sym.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(sym))):
        raise ValueError("quadratic form is not Hermitian")
    return sym.real


def feedback_spec(params, gains):
    """Unmonitored engine spec of the feedback master equation."""
    g, eps = params.g, params.epsilon
    j_s = np.array([params.alpha, 1j * params.beta]) / math.sqrt(2.0)
    e_x, e_p = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    f = math.sqrt(g * (1 - eps)) * gains.xi1 * e_p + 1j * math.sqrt(g * eps) * gains.xi2 * e_x
    kernel = 0.5 * (np.outer(f, j_s) + np.outer(j_s.conj(), f.conj()))
    ham = _bilinear_to_matrix(kernel)
    base = probe_spec(params.theta, g, params.gamma, params.n, eps, 0.0, conditional=False)
    probes = []
    if eps < 1:
        probes.append(math.sqrt(g * (1 - eps)) * j_s - 1j * gains.xi1 * e_p)
    if eps > 0:
        probes.append(1j * (math.sqrt(g * eps) * j_s - gains.xi2 * e_x))
    n_probe = (eps < 1) + (eps > 0)
    thermal = base.jump_vectors[n_probe:] if g > 0 else base.jump_vectors
    return SystemSpec(1, ham, tuple(probes) + tuple(thermal), 0)
