"""One oscillator probed by a 1D light field.

The probe couples through ``s = (alpha X + i beta P)/sqrt(2)`` with
``alpha = cos(theta)``, ``beta = sin(theta)`` at rate ``g = d * gamma``.  The
transmitted light is split on a beamsplitter of reflectivity ``epsilon`` and
both outputs are homodyned.  Variances are in shot-noise units (vacuum = 1).
"""

from dataclasses import dataclass
import math

import numpy as np

from .engine import SystemSpec
from .errors import AntisqueezingUnbounded, UnstableRegime
from .table import SweepTable

__all__ = [
    "InteractionParams", "SteadyResult", "probe_spec", "make_spec",
    "conditional_rhs", "conditional_steady", "unconditional_steady",
    "variance_curves", "qnd_pulse_variance", "vu_of_theta", "uu_of_theta",
    "vc_of_theta", "uc_of_theta", "quadratic_root",
]

# jump vectors over (X, P) for a, a^dagger
_J_ANNIHILATE = np.array([1.0, 1.0j]) / math.sqrt(2.0)
_J_CREATE = np.array([1.0, -1.0j]) / math.sqrt(2.0)


@dataclass(frozen=True)
class InteractionParams:
    """Experimental knobs of the single-mode setup.

    ``theta`` is the interaction angle (QND at 0, beam splitter at pi/4, two
    mode squeezing at -pi/4), ``epsilon`` the beamsplitter reflectivity,
    ``phi`` the local-oscillator phase, ``d`` the optical depth, ``n`` the
    thermal occupation and ``gamma`` the decay rate.
    """

    theta: float
    d: float
    n: float = 0.0
    epsilon: float = 0.0
    phi: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not abs(self.theta) < math.pi / 2:
            raise ValueError(f"|theta| must be < pi/2, got {self.theta}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not self.d > 0:
            raise ValueError(f"optical depth must be positive, got {self.d}")
        if not self.n >= 0:
            raise ValueError(f"occupation must be non-negative, got {self.n}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def g(self):
        return self.d * self.gamma

    @property
    def alpha(self):
        return math.cos(self.theta)

    @property
    def beta(self):
        return math.sin(self.theta)


@dataclass(frozen=True)
class SteadyResult:
    """Squeezed/antisqueezed steady variances (``inf`` when unbounded)."""

    v_squeezed: float
    u_antisqueezed: float
    c_cov: float = 0.0
    stable: bool = True


def _require_phi_zero(params):
    if params.phi != 0.0:
        raise ValueError("closed forms assume the optimal local-oscillator phase phi=0")


def probe_spec(theta, g, gamma=1.0, n=0.0, epsilon=0.0, phi=0.0, conditional=True):
    """Engine spec from raw rates; allows ``g = 0`` or ``gamma = 0``.

    Channel order: monitored probe channels first (``sqrt(g(1-eps)) s e^{i phi}``
    then ``sqrt(g eps) i s e^{i phi}``, zero-amplitude ones omitted), then the
    thermal channels ``sqrt(gamma(n+1)) a`` and ``sqrt(gamma n) a^dagger``.
    """
    j_s = np.array([math.cos(theta), 1j * math.sin(theta)]) / math.sqrt(2.0)
    phase = complex(math.cos(phi), math.sin(phi))
    probes = []
    if g > 0 and epsilon < 1:
        probes.append(math.sqrt(g * (1 - epsilon)) * phase * j_s)
    if g > 0 and epsilon > 0:
        probes.append(math.sqrt(g * epsilon) * 1j * phase * j_s)
    thermal = []
    if gamma > 0:
        thermal.append(math.sqrt(gamma * (n + 1)) * _J_ANNIHILATE)
        if n > 0:
            thermal.append(math.sqrt(gamma * n) * _J_CREATE)
    return SystemSpec(1, np.zeros((2, 2)), tuple(probes + thermal),
                      len(probes) if conditional else 0)


def make_spec(params, conditional=True):
    """Engine spec for :class:`InteractionParams`."""
    return probe_spec(params.theta, params.g, params.gamma, params.n,
                      params.epsilon, params.phi, conditional)


def conditional_rhs(v, u, params):
    """Right-hand sides of the conditional variance equations."""
    _require_phi_zero(params)
    g, gam, n, eps = params.g, params.gamma, params.n, params.epsilon
    a, b = params.alpha, params.beta
    dv = (-(gam - g * (1 - 2 * eps) * a * b) * v - g * (1 - eps) * a * a * v * v
          + gam * (2 * n + 1) + g * eps * b * b)
    du = (-(gam + g * (1 - 2 * eps) * a * b) * u - g * eps * b * b * u * u
          + gam * (2 * n + 1) + g * (1 - eps) * a * a)
    return dv, du


def quadratic_root(quad, lin, const):
    """Positive root of ``quad x^2 + lin x - const = 0`` (``quad, const >= 0``).

    Written as ``2 const / (lin + sqrt(lin^2 + 4 quad const))`` so that the
    ``quad -> 0`` limit is exact; returns ``inf`` where no finite root exists.
    """
    quad, lin, const = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (quad, lin, const)))
    den = lin + np.sqrt(np.maximum(lin * lin + 4 * quad * const, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, 2 * const / np.where(den > 0, den, 1.0), np.inf)
    return out[()] if out.ndim == 0 else out


def vu_of_theta(theta, d, n):
    """Unconditional squeezed variance versus angle (``inf`` when unstable)."""
    theta = np.asarray(theta, dtype=float)
    den = 1 + d * np.sin(2 * theta) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, (2 * n + 1 + d * np.sin(theta) ** 2) / np.where(den > 0, den, 1.0), np.inf)
    return out[()] if out.ndim == 0 else out


def uu_of_theta(theta, d, n):
    """Unconditional antisqueezed variance versus angle."""
    theta = np.asarray(theta, dtype=float)
    den = 1 + d * np.sin(2 * theta) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, (2 * n + 1 + d * np.cos(theta) ** 2) / np.where(den > 0, den, 1.0), np.inf)
    return out[()] if out.ndim == 0 else out


def vc_of_theta(theta, d, n, epsilon=0.0):
    """Conditional squeezed variance versus angle and optical depth."""
    a, b = np.cos(theta), np.sin(theta)
    return quadratic_root(d * (1 - epsilon) * a * a, 1 - d * (1 - 2 * epsilon) * a * b,
                          2 * n + 1 + d * epsilon * b * b)


def uc_of_theta(theta, d, n, epsilon=0.0):
    """Conditional antisqueezed variance versus angle and optical depth."""
    a, b = np.cos(theta), np.sin(theta)
    return quadratic_root(d * epsilon * b * b, 1 + d * (1 - 2 * epsilon) * a * b,
                          2 * n + 1 + d * (1 - epsilon) * a * a)


def conditional_steady(params, strict=True):
    """Steady conditional variances.

    Parameters
    ----------
    strict : bool
        If true, raise :class:`AntisqueezingUnbounded` when a variance has no
        finite steady state (``epsilon`` in {0, 1} below the stability angle);
        otherwise return the result flagged ``stable=False`` with ``inf``.
    """
    _require_phi_zero(params)
    g, gam, n, eps = params.g, params.gamma, params.n, params.epsilon
    a, b = params.alpha, params.beta
    v = float(quadratic_root(g * (1 - eps) * a * a, gam - g * (1 - 2 * eps) * a * b,
                             gam * (2 * n + 1) + g * eps * b * b))
    u = float(quadratic_root(g * eps * b * b, gam + g * (1 - 2 * eps) * a * b,
                             gam * (2 * n + 1) + g * (1 - eps) * a * a))
    result = SteadyResult(v, u, 0.0, bool(np.isfinite(v) and np.isfinite(u)))
    if strict and not result.stable:
        raise AntisqueezingUnbounded(
            f"conditional variance unbounded at theta={params.theta:.6g}, "
            f"epsilon={eps:g}, d={params.d:g}", result)
    return result


def unconditional_steady(params):
    """Steady unconditional variances; raises :class:`UnstableRegime` below the stability angle."""
    g, gam, n = params.g, params.gamma, params.n
    a, b = params.alpha, params.beta
    rate = gam + g * a * b
    if rate <= 0:
        raise UnstableRegime(f"gamma + g alpha beta = {rate:.3g} <= 0 at theta={params.theta:.6g}")
    return SteadyResult((g * b * b + gam * (2 * n + 1)) / rate,
                        (g * a * a + gam * (2 * n + 1)) / rate)


def variance_curves(theta_grid, params):
    """Tabulate unconditional and conditional variances over ``theta_grid``.

    ``params.theta`` is ignored.  Rows where the unconditional dynamics is
    unstable carry ``stable = 0`` and ``inf`` for the unbounded quantities.
    """
    theta = np.asarray(theta_grid, dtype=float)
    if np.any(np.abs(theta) >= math.pi / 2):
        raise ValueError("theta grid must lie inside (-pi/2, pi/2)")
    d, n, eps = params.d, params.n, params.epsilon
    stable = 1 + d * np.sin(2 * theta) / 2 > 0
    return SweepTable({
        "theta": theta,
        "V_u": vu_of_theta(theta, d, n),
        "U_u": uu_of_theta(theta, d, n),
        "V_c": vc_of_theta(theta, d, n, eps),
        "U_c": uc_of_theta(theta, d, n, eps),
        "stable": stable.astype(int),
    }, {"d": d, "n": n, "epsilon": eps})


def qnd_pulse_variance(g, tau):
    """Squeezed variance after a lossless QND pulse of duration ``tau``.

    Equivalent to ``1/(1 + kappa^2)`` with ``kappa^2 = d * eta``, ``eta = gamma tau``.
    """
    if g < 0 or tau < 0:
        raise ValueError("g and tau must be non-negative")
    return 1.0 / (1.0 + g * tau)
