"""Two oscillators coupled in sequence to one 1D field.

Quadrature order is ``(X1, P1, X2, P2)``.  Mode ``i`` couples through
``s_i = (alpha_i X_i + i beta_i P_i)/sqrt(2)``; the field mediates the
Hamiltonian ``-i(g/2)(s2^dag s1 - s1^dag s2)`` and the collective jump
``sqrt(g)(s1 + s2)``.  With counter-rotating local Hamiltonians
``+-omega a_i^dag a_i`` and ``g << omega`` the dynamics of the EPR modes
``X+- = (X1 +- X2)/sqrt(2)`` decouples into two copies of the single-mode
problem.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .engine import SystemSpec
from .errors import AsymmetricParams
from .single_mode import InteractionParams, probe_spec

__all__ = [
    "CascadedParams", "mediated_coefficients", "mediated_hamiltonian",
    "make_cascaded_spec", "make_cascaded_rwa_spec", "make_rwa_epr_specs",
    "epr_transform", "entanglement_criterion", "RWA_WARNING_RATIO",
]

RWA_WARNING_RATIO = 0.1

_SQ2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CascadedParams:
    """Parameters of the cascaded two-mode setup (pairs are per mode)."""

    alpha: tuple
    beta: tuple
    gamma: tuple
    n: tuple
    g: float
    omega: float = 0.0
    epsilon: float = 0.0
    phi: float = 0.0
    rwa: bool = False

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "n"):
            val = tuple(float(x) for x in getattr(self, name))
            if len(val) != 2:
                raise ValueError(f"{name} needs one value per mode")
            object.__setattr__(self, name, val)
        if not self.g > 0 or min(self.gamma) <= 0:
            raise ValueError("g and gamma_i must be positive")
        if min(self.n) < 0 or self.omega < 0:
            raise ValueError("n_i and omega must be non-negative")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.rwa and self.omega > 0:
            ratio = max(self.g, *(gm * nm for gm, nm in zip(self.gamma, self.n))) / self.omega
            if ratio > RWA_WARNING_RATIO:
                warnings.warn(f"rotating-wave approximation questionable: rate/omega = {ratio:.3g}")

    @classmethod
    def symmetric(cls, theta, d, n=0.0, epsilon=0.0, gamma=1.0, omega=0.0, phi=0.0, rwa=False):
        """Identical coupling, decay and occupation for both modes."""
        a, b = math.cos(theta), math.sin(theta)
        return cls((a, a), (b, b), (gamma, gamma), (n, n), d * gamma, omega, epsilon, phi, rwa)

    def is_symmetric(self, tol=1e-12):
        return all(abs(p[0] - p[1]) <= tol * max(1.0, abs(p[0]))
                   for p in (self.alpha, self.beta, self.gamma, self.n))

    def single_mode_params(self):
        """Single-mode parameters with the same ``g`` and ``gamma`` (symmetric case)."""
        if not self.is_symmetric():
            raise AsymmetricParams("parameters differ between the two modes")
        return InteractionParams(math.atan2(self.beta[0], self.alpha[0]),
                                 self.g / self.gamma[0], self.n[0], self.epsilon,
                                 self.phi, self.gamma[0])


def _mode_vector(mode, x_coef, p_coef):
    vec = np.zeros(4, dtype=complex)
    vec[2 * mode], vec[2 * mode + 1] = x_coef, p_coef
    return vec


def _ladder(mode, dagger=False):
    return _mode_vector(mode, 1 / _SQ2, (-1j if dagger else 1j) / _SQ2)


def _coupling_vector(params, mode):
    return _mode_vector(mode, params.alpha[mode] / _SQ2, 1j * params.beta[mode] / _SQ2)


def _bilinear_to_matrix(kernel):
    # H = r^T K r  ->  M with H = r^T M r / 2 (antisymmetric parts are c-numbers)
    sym = kernel + kernel.T
    if np.max(np.abs(sym.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(sym))):
        raise ValueError("quadratic form is not Hermitian")
    return sym.real


def mediated_coefficients(alpha, beta):
    """Two-mode-squeezing and beam-splitter weights of the mediated interaction.

    ``-i(g/2)(s2^dag s1 - s1^dag s2) = -i(g/2)[tms (a1 a2 - a1^dag a2^dag)
    + bs (a1 a2^dag - a1^dag a2)]``.
    """
    tms = (alpha[1] * beta[0] - alpha[0] * beta[1]) / 2
    bs = (alpha[1] * beta[0] + alpha[0] * beta[1]) / 2
    return tms, bs


def mediated_hamiltonian(params):
    """``M`` of ``-i(g/2)(s2^dag s1 - s1^dag s2)``."""
    u1, u2 = _coupling_vector(params, 0), _coupling_vector(params, 1)
    kernel = -0.5j * params.g * (np.outer(u2.conj(), u1) - np.outer(u1.conj(), u2))
    return _bilinear_to_matrix(kernel)


def _thermal_channels(params):
    out = []
    for mode in (0, 1):
        gam, n = params.gamma[mode], params.n[mode]
        out.append(math.sqrt(gam * (n + 1)) * _ladder(mode))
        if n > 0:
            out.append(math.sqrt(gam * n) * _ladder(mode, dagger=True))
    return out


def _split_probe(rate, vec, epsilon, phi, second_phase=1j):
    """Monitored channels ``sqrt(rate(1-e)) e^{i phi} L`` and ``sqrt(rate e) c e^{i phi} L``."""
    phase = complex(math.cos(phi), math.sin(phi))
    out = []
    if epsilon < 1:
        out.append(math.sqrt(rate * (1 - epsilon)) * phase * vec)
    if epsilon > 0:
        out.append(math.sqrt(rate * epsilon) * second_phase * phase * vec)
    return out


def make_cascaded_spec(params):
    """Full (lab-frame, no RWA) two-mode spec.

    Local Hamiltonians ``omega a1^dag a1 - omega a2^dag a2`` plus the mediated
    interaction; the collective probe ``sqrt(g)(s1 + s2)`` split over the two
    monitored detectors; thermal channels for both modes.
    """
    ham = np.diag([params.omega, params.omega, -params.omega, -params.omega])
    ham = ham + mediated_hamiltonian(params)
    collective = _coupling_vector(params, 0) + _coupling_vector(params, 1)
    probes = _split_probe(params.g, collective, params.epsilon, params.phi)
    return SystemSpec(2, ham, tuple(probes + _thermal_channels(params)), len(probes))


def _sideband_operators(params):
    (a1, a2), (b1, b2) = params.alpha, params.beta
    s_plus = (a1 + b1) / 2 * _ladder(0) + (a2 - b2) / 2 * _ladder(1, dagger=True)
    s_minus = (a2 + b2) / 2 * _ladder(1) + (a1 - b1) / 2 * _ladder(0, dagger=True)
    return s_plus, s_minus


def make_cascaded_rwa_spec(params):
    """Rotating-frame two-mode spec after the rotating-wave approximation.

    Only the two-mode-squeezing part of the mediated interaction survives.
    The probe acts through the cosine and sine sideband combinations
    ``s+ + s-`` and ``-i(s+ - s-)``, each at rate ``g/2`` and split over both
    detectors, giving four monitored channels.
    """
    tms, _ = mediated_coefficients(params.alpha, params.beta)
    # -i(g/2) tms (a1 a2 - a1^dag a2^dag)
    a1, a2 = _ladder(0), _ladder(1)
    kernel = -0.5j * params.g * tms * (np.outer(a1, a2) - np.outer(a1.conj(), a2.conj()))
    ham = _bilinear_to_matrix(kernel)
    s_plus, s_minus = _sideband_operators(params)
    eps, phi, rate = params.epsilon, params.phi, params.g / 2
    probes = (_split_probe(rate, s_plus + s_minus, eps, phi, 1j)
              + _split_probe(rate, -1j * (s_plus - s_minus), eps, phi, 1j))
    return SystemSpec(2, ham, tuple(probes + _thermal_channels(params)), len(probes))


def make_rwa_epr_specs(params):
    """Single-mode specs for the ``+`` and ``-`` EPR modes (symmetric parameters).

    Returns ``(spec_plus, spec_minus)`` over the quadratures ``(X+, P+)`` and
    ``(X-, P-)``.  The jump operators are ``alpha X+ + i beta P+`` and
    ``alpha P- - i beta X-`` at rate ``g/2`` (equivalently ``sqrt(g) s`` on the
    EPR mode, since ``alpha X + i beta P = sqrt(2) s``).

    Raises
    ------
    AsymmetricParams
    """
    if not params.is_symmetric():
        raise AsymmetricParams("EPR factorisation requires identical parameters for both modes")
    a, b = params.alpha[0], params.beta[0]
    gam, n = params.gamma[0], params.n[0]
    eps, phi, rate = params.epsilon, params.phi, params.g / 2
    thermal = probe_spec(0.0, 0.0, gam, n).jump_vectors
    plus_op = np.array([a, 1j * b])
    minus_op = np.array([-1j * b, a])
    plus = _split_probe(rate, plus_op, eps, phi, 1j)
    minus = _split_probe(rate, minus_op, eps, phi, 1j)
    zero = np.zeros((2, 2))
    return (SystemSpec(1, zero, tuple(plus) + thermal, len(plus)),
            SystemSpec(1, zero, tuple(minus) + thermal, len(minus)))


_EPR = np.array([[1, 0, 1, 0],
                 [0, 1, 0, 1],
                 [1, 0, -1, 0],
                 [0, 1, 0, -1]]) / _SQ2


def epr_transform(joint_cov):
    """Rotate a 4x4 covariance to ``(X+, P+, X-, P-)``.

    Returns ``(cov_plus, cov_minus, cross)``.
    """
    cov = np.asarray(joint_cov, dtype=float)
    if cov.shape != (4, 4):
        raise ValueError("expected a 4x4 covariance matrix")
    rot = _EPR @ cov @ _EPR.T
    return rot[:2, :2], rot[2:, 2:], rot[:2, 2:]


def entanglement_criterion(cov_plus, cov_minus):
    """EPR variance sum ``Var(X+) + Var(P-)``; entangled when below 2."""
    total = float(cov_plus[0, 0] + cov_minus[1, 1])
    return total, total < 2.0
