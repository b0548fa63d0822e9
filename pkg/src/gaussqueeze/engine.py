"""Gaussian moment equations for quadratic open bosonic systems.

A system of ``a`` modes with quadratures ``r = (x_1, p_1, ..., x_a, p_a)`` is
described by a quadratic Hamiltonian ``H = r^T M r / 2`` and linear jump
operators ``J_i = r^T j_i``.  The first ``c`` jumps are monitored by
homodyne detection.  This module turns that description into drift and
diffusion matrices and evolves the displacement vector ``s`` and the
covariance matrix ``Gamma`` (symmetrised second moments, ``Gamma = 2 Cov``)
either conditionally (Riccati equation plus a stochastic mean) or
unconditionally (Lyapunov equation).

Covariances are in shot-noise units: the vacuum has ``Gamma = 1``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import linalg

from .errors import (DimensionMismatch, DivergenceDetected, NoConvergence,
                     NonHermitianInput)

__all__ = [
    "SystemSpec", "GaussianState", "DriftDiffusion", "CovarianceTrajectory",
    "SteadyCovariance", "Trajectory", "symplectic_form", "build_matrices",
    "riccati_rhs", "evolve_covariance", "steady_covariance",
    "simulate_trajectory", "simulate_ensemble", "is_physical",
    "DIVERGENCE_THRESHOLD",
]

DIVERGENCE_THRESHOLD = 1e9


def symplectic_form(num_modes):
    """Block-diagonal symplectic matrix with blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(num_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Quadratic open system with ``b`` jump channels, ``c`` of them monitored.

    Parameters
    ----------
    num_modes : int
        Number of bosonic modes ``a``.
    hamiltonian_matrix : array_like, shape (2a, 2a)
        Real symmetric matrix ``M`` (units of rate).
    jump_vectors : sequence of array_like, each of shape (2a,)
        Complex vectors ``j_i`` with ``J_i = r^T j_i`` (units of sqrt(rate)).
    monitored_count : int
        The first ``monitored_count`` channels are homodyne monitored.
    """

    num_modes: int
    hamiltonian_matrix: np.ndarray
    jump_vectors: tuple = ()
    monitored_count: int = 0

    def __post_init__(self):
        if int(self.num_modes) != self.num_modes or self.num_modes < 1:
            raise DimensionMismatch(f"num_modes must be a positive integer, got {self.num_modes}")
        dim = 2 * int(self.num_modes)
        ham = np.array(self.hamiltonian_matrix, dtype=float)
        if ham.shape != (dim, dim):
            raise DimensionMismatch(f"hamiltonian_matrix must be {dim}x{dim}, got {ham.shape}")
        scale = max(1.0, np.max(np.abs(ham)))
        if np.max(np.abs(ham - ham.T)) > 1e-12 * scale:
            raise NonHermitianInput("hamiltonian_matrix is not symmetric")
        jumps = []
        for vec in self.jump_vectors:
            vec = np.array(vec, dtype=complex)
            if vec.shape != (dim,):
                raise DimensionMismatch(f"jump vectors must have length {dim}, got shape {vec.shape}")
            jumps.append(vec)
        if not 0 <= self.monitored_count <= len(jumps):
            raise DimensionMismatch(
                f"monitored_count={self.monitored_count} outside [0, {len(jumps)}]")
        object.__setattr__(self, "num_modes", int(self.num_modes))
        object.__setattr__(self, "hamiltonian_matrix", ham)
        object.__setattr__(self, "jump_vectors", tuple(jumps))
        object.__setattr__(self, "monitored_count", int(self.monitored_count))

    @property
    def dim(self):
        return 2 * self.num_modes

    def with_monitoring(self, monitored_count):
        """Copy of the spec with a different number of monitored channels."""
        return SystemSpec(self.num_modes, self.hamiltonian_matrix,
                          self.jump_vectors, monitored_count)

    def rate_scale(self):
        """Largest rate in the spec, used for default step sizes."""
        rates = [np.max(np.abs(self.hamiltonian_matrix), initial=0.0)]
        rates += [float(np.vdot(j, j).real) for j in self.jump_vectors]
        return max(max(rates), 1e-300)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Displacement vector and covariance matrix of a Gaussian state."""

    displacement: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        s = np.array(self.displacement, dtype=float)
        cov = np.array(self.covariance, dtype=float)
        if cov.shape != (s.size, s.size) or s.size % 2:
            raise DimensionMismatch(
                f"displacement of length {s.size} incompatible with covariance {cov.shape}")
        if np.max(np.abs(cov - cov.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(cov))):
            raise DimensionMismatch("covariance is not symmetric")
        object.__setattr__(self, "displacement", s)
        object.__setattr__(self, "covariance", cov)

    @classmethod
    def vacuum(cls, num_modes):
        return cls(np.zeros(2 * num_modes), np.eye(2 * num_modes))

    @property
    def num_modes(self):
        return self.displacement.size // 2


def is_physical(covariance, tol=1e-9):
    """Check ``Gamma + i sigma >= 0`` (uncertainty principle)."""
    cov = np.asarray(covariance, dtype=float)
    sigma = symplectic_form(cov.shape[0] // 2)
    eigs = np.linalg.eigvalsh(cov + 1j * sigma)
    return bool(eigs.min() >= -tol)


@dataclass(frozen=True, eq=False)
class DriftDiffusion:
    """Real matrices entering the moment equations.

    ``meas_a`` and ``meas_b`` hold one row per monitored channel.
    """

    drift: np.ndarray
    diffusion: np.ndarray
    meas_a: np.ndarray
    meas_b: np.ndarray
    symplectic: np.ndarray

    @property
    def monitored_count(self):
        return self.meas_a.shape[0]

    def riccati_terms(self, conditional=True):
        """Return ``(F, N, G)`` so that ``dGamma/dt = F G + G F^T + N - G G G``.

        With ``F = Q + 2 sigma B^T A``, ``N = P - 2 sigma B^T B sigma^T`` and
        ``G = 2 A^T A`` where ``A``, ``B`` stack the per-channel vectors as rows.
        Unconditional evolution drops every measurement term.
        """
        q, p, sig = self.drift, self.diffusion, self.symplectic
        if not conditional or self.monitored_count == 0:
            return q, p, np.zeros_like(q)
        a, b = self.meas_a, self.meas_b
        f = q + 2.0 * sig @ b.T @ a
        noise = p - 2.0 * sig @ b.T @ b @ sig.T
        gain = 2.0 * a.T @ a
        return f, 0.5 * (noise + noise.T), gain


def _discard_imag(mat, what):
    mat = np.asarray(mat)
    scale = max(1.0, np.max(np.abs(mat), initial=0.0))
    if np.max(np.abs(mat.imag), initial=0.0) > 1e-12 * scale:
        raise ValueError(f"{what} has a non-negligible imaginary part")
    return np.ascontiguousarray(mat.real)


def build_matrices(spec):
    """Drift ``Q``, diffusion ``P`` and measurement vectors of a spec.

    ``R = -(i/2) sum_i (j_i^* j_i^T - c.c.)``, ``S = (1/2) sum_i (j_i^* j_i^T + c.c.)``,
    ``Q = sigma (M + R)``, ``P = 2 sigma S sigma^T``; for every monitored channel
    ``A_k = (j_k + j_k^*)/2`` and ``B_k = -(i/2)(j_k - j_k^*)``.
    """
    dim = spec.dim
    sig = symplectic_form(spec.num_modes)
    outer = np.zeros((dim, dim), dtype=complex)
    for j in spec.jump_vectors:
        outer += np.outer(j.conj(), j)
    r_mat = _discard_imag(-0.5j * (outer - outer.conj()), "R")
    s_mat = _discard_imag(0.5 * (outer + outer.conj()), "S")
    drift = sig @ (spec.hamiltonian_matrix + r_mat)
    diffusion = 2.0 * sig @ s_mat @ sig.T
    diffusion = 0.5 * (diffusion + diffusion.T)
    monitored = spec.jump_vectors[:spec.monitored_count]
    meas_a = np.array([_discard_imag(0.5 * (j + j.conj()), "A") for j in monitored]).reshape(-1, dim)
    meas_b = np.array([_discard_imag(-0.5j * (j - j.conj()), "B") for j in monitored]).reshape(-1, dim)
    return DriftDiffusion(drift, diffusion, meas_a, meas_b, sig)


def _rhs(gamma_mat, f, noise, gain):
    fg = f @ gamma_mat
    out = fg + fg.T + noise - gamma_mat @ gain @ gamma_mat
    return 0.5 * (out + out.T)


def riccati_rhs(gamma_mat, dd, conditional=True):
    """Time derivative of the covariance matrix.

    Conditional evolution uses the full Riccati form with measurement
    back-action; unconditional evolution reduces to ``Q G + G Q^T + P``.
    The result is symmetrised.
    """
    gamma_mat = np.asarray(gamma_mat, dtype=float)
    if gamma_mat.shape != dd.drift.shape:
        raise DimensionMismatch(f"covariance shape {gamma_mat.shape} != {dd.drift.shape}")
    return _rhs(gamma_mat, *dd.riccati_terms(conditional))


def _rk4_step(gamma_mat, h, terms, k1=None):
    if k1 is None:
        k1 = _rhs(gamma_mat, *terms)
    k2 = _rhs(gamma_mat + 0.5 * h * k1, *terms)
    k3 = _rhs(gamma_mat + 0.5 * h * k2, *terms)
    k4 = _rhs(gamma_mat + h * k3, *terms)
    out = gamma_mat + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (out + out.T)


def _check_divergence(gamma_mat, t):
    if not np.all(np.isfinite(gamma_mat)) or np.max(np.abs(gamma_mat)) > DIVERGENCE_THRESHOLD:
        raise DivergenceDetected(
            f"covariance exceeded {DIVERGENCE_THRESHOLD:g} at t={t:.6g}", time=t)


def _default_dt(spec):
    return 1e-3 / spec.rate_scale()


def _step_grid(duration, dt):
    if dt <= 0:
        raise ValueError("dt must be positive")
    if duration < 0:
        raise ValueError("duration must be non-negative")
    steps = int(math.ceil(duration / dt - 1e-9)) if duration > 0 else 0
    h = duration / steps if steps else 0.0
    return steps, h


@dataclass(frozen=True, eq=False)
class CovarianceTrajectory:
    """Covariance matrices sampled at the integrator's step boundaries."""

    times: np.ndarray
    covariances: np.ndarray

    @property
    def final(self):
        return self.covariances[-1]

    @property
    def step_change(self):
        """Max-abs change between successive samples (length ``len(times) - 1``)."""
        diffs = np.diff(self.covariances, axis=0)
        return np.max(np.abs(diffs), axis=(1, 2)) if len(diffs) else np.zeros(0)


def evolve_covariance(spec, gamma0, duration, dt=None, conditional=True):
    """Integrate the covariance equation with fixed-step RK4.

    Raises
    ------
    DivergenceDetected
        If any entry exceeds ``DIVERGENCE_THRESHOLD``.
    """
    dd = build_matrices(spec)
    terms = dd.riccati_terms(conditional)
    gamma_mat = np.array(gamma0, dtype=float)
    if gamma_mat.shape != (spec.dim, spec.dim):
        raise DimensionMismatch(f"gamma0 must be {spec.dim}x{spec.dim}")
    steps, h = _step_grid(duration, _default_dt(spec) if dt is None else dt)
    out = np.empty((steps + 1, spec.dim, spec.dim))
    out[0] = gamma_mat
    for k in range(steps):
        gamma_mat = _rk4_step(gamma_mat, h, terms)
        _check_divergence(gamma_mat, (k + 1) * h)
        out[k + 1] = gamma_mat
    return CovarianceTrajectory(np.arange(steps + 1) * h, out)


@dataclass(frozen=True, eq=False)
class SteadyCovariance:
    """Steady covariance and the relative algebraic residual it satisfies."""

    covariance: np.ndarray
    residual: float
    method: str
    time: float = 0.0


def _relative_residual(gamma_mat, terms):
    f, noise, gain = terms
    fg = f @ gamma_mat
    ggg = gamma_mat @ gain @ gamma_mat
    res = fg + fg.T + noise - ggg
    scale = max(np.max(np.abs(fg)), np.max(np.abs(noise)), np.max(np.abs(ggg)), 1e-300)
    return np.max(np.abs(0.5 * (res + res.T))) / scale


def _hurwitz(mat, margin=0.0):
    return bool(np.max(np.linalg.eigvals(mat).real) < -margin)


def _newton_polish(gamma_mat, terms, tol, max_iter=8):
    f, noise, gain = terms
    for _ in range(max_iter):
        if _relative_residual(gamma_mat, terms) <= tol:
            break
        res = _rhs(gamma_mat, f, noise, gain)
        closed = f - gamma_mat @ gain
        delta = linalg.solve_continuous_lyapunov(closed, -res)
        gamma_mat = gamma_mat + 0.5 * (delta + delta.T)
    return gamma_mat


def _algebraic_steady(dd, conditional, tol):
    """Stabilising solution via Schur methods, or None if there is none."""
    terms = dd.riccati_terms(conditional)
    f, noise, gain = terms
    rate = max(np.max(np.abs(f)), np.max(np.abs(gain)), 1e-300)
    try:
        if np.max(np.abs(gain)) == 0.0:
            if not _hurwitz(f, 1e-9 * rate):
                return None
            gamma_mat = linalg.solve_continuous_lyapunov(f, -noise)
        else:
            b = math.sqrt(2.0) * dd.meas_a.T
            gamma_mat = linalg.solve_continuous_are(f.T, b, noise, np.eye(b.shape[1]))
    except (linalg.LinAlgError, ValueError):
        return None
    gamma_mat = 0.5 * (gamma_mat + gamma_mat.T)
    if not np.all(np.isfinite(gamma_mat)) or not _hurwitz(f - gamma_mat @ gain, 1e-9 * rate):
        return None
    return _newton_polish(gamma_mat, terms, tol)


def _integrated_steady(spec, dd, conditional, tol, dt, max_time, gamma0):
    terms = dd.riccati_terms(conditional)
    gamma_mat = np.eye(spec.dim) if gamma0 is None else np.array(gamma0, dtype=float)
    h = 0.05 / spec.rate_scale() if dt is None else dt
    if max_time is None:
        max_time = 1e5 * h
    t = 0.0
    while t < max_time:
        k1 = _rhs(gamma_mat, *terms)
        scale = max(np.max(np.abs(gamma_mat)), 1e-300)
        if np.max(np.abs(k1)) <= tol * spec.rate_scale() * scale:
            return gamma_mat, t
        gamma_mat = _rk4_step(gamma_mat, h, terms, k1)
        t += h
        _check_divergence(gamma_mat, t)
    raise NoConvergence(f"no steady state within t={max_time:.6g}")


def steady_covariance(spec, conditional=True, tol=1e-12, method="auto",
                      dt=None, max_time=None, gamma0=None):
    """Long-time limit of the covariance equation.

    Parameters
    ----------
    spec : SystemSpec
    conditional : bool
        Riccati (monitored) or Lyapunov (unmonitored) dynamics.
    tol : float
        Relative tolerance on the stationarity residual.
    method : {"auto", "algebraic", "integrate"}
        ``"integrate"`` runs RK4 from ``gamma0`` (vacuum by default) until the
        rate of change is below ``tol`` relative to ``spec.rate_scale()``.
        ``"algebraic"`` computes the stabilising solution of the stationary
        equation with Schur methods and Newton-polishes it; the stabilising
        solution is the unique attractor of the integrated dynamics.  When no
        stabilising solution exists, ``"auto"`` falls back to integration,
        which then either converges (marginal cases) or reports divergence.

    Raises
    ------
    DivergenceDetected, NoConvergence
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dd = build_matrices(spec)
    terms = dd.riccati_terms(conditional)
    if method in ("auto", "algebraic"):
        gamma_mat = _algebraic_steady(dd, conditional, tol)
        if gamma_mat is not None:
            res = _relative_residual(gamma_mat, terms)
            if res > max(tol, 1e-10):
                raise NoConvergence(f"Newton polish stalled at residual {res:.3g}")
            return SteadyCovariance(gamma_mat, res, "algebraic")
        if method == "algebraic":
            raise DivergenceDetected("no stabilising steady state exists")
    elif method != "integrate":
        raise ValueError(f"unknown method {method!r}")
    gamma_mat, t = _integrated_steady(spec, dd, conditional, tol, dt, max_time, gamma0)
    return SteadyCovariance(gamma_mat, _relative_residual(gamma_mat, terms), "integrate", t)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Conditional displacement path with its co-evolved covariance."""

    times: np.ndarray
    displacements: np.ndarray
    covariances: np.ndarray


def _noise_matrices(gamma_mat, dd):
    # column k is the displacement kick per unit Wiener increment of channel k
    return gamma_mat @ dd.meas_a.T - dd.symplectic @ dd.meas_b.T


def _simulate(spec, state0, duration, dt, draw, n_paths, keep_path=True):
    dd = build_matrices(spec)
    terms = dd.riccati_terms(True)
    steps, h = _step_grid(duration, dt)
    propagator = linalg.expm(dd.drift * h)
    gamma_mat = state0.covariance.copy()
    s = np.broadcast_to(state0.displacement, (n_paths, spec.dim)).copy()
    covs = np.empty((steps + 1, spec.dim, spec.dim))
    covs[0] = gamma_mat
    path = [s.copy()] if keep_path else None
    for k in range(steps):
        kick = _noise_matrices(gamma_mat, dd)
        dw = draw(k, h)
        s = s @ propagator.T + dw @ kick.T
        gamma_mat = _rk4_step(gamma_mat, h, terms)
        _check_divergence(gamma_mat, (k + 1) * h)
        if not np.all(np.isfinite(s)) or np.max(np.abs(s), initial=0.0) > DIVERGENCE_THRESHOLD:
            raise DivergenceDetected(f"displacement diverged at t={(k + 1) * h:.6g}", (k + 1) * h)
        covs[k + 1] = gamma_mat
        if keep_path:
            path.append(s.copy())
    return np.arange(steps + 1) * h, (np.array(path) if keep_path else s[None]), covs


def simulate_trajectory(spec, state0, duration, dt, seed=None, increments=None):
    """One conditional trajectory of the displacement vector.

    The mean follows ``ds = Q s dt + (Gamma A_k - sigma B_k) dW_k`` summed over
    monitored channels; the deterministic part is propagated exactly with
    ``exp(Q dt)`` and the noise with an Euler-Maruyama increment.  ``Gamma`` is
    co-integrated with RK4 on the same grid.

    Parameters
    ----------
    seed : int, optional
        Seed for ``numpy.random.default_rng``; required unless ``increments``
        is given.  Identical seeds give bit-identical paths.
    increments : array_like, shape (steps, monitored_count), optional
        Explicit Wiener increments, e.g. to couple paths at different ``dt``.
    """
    steps, h = _step_grid(duration, dt)
    c = spec.monitored_count
    if increments is not None:
        dws = np.asarray(increments, dtype=float).reshape(steps, c)
    else:
        if seed is None:
            raise ValueError("a seed is required for reproducible trajectories")
        rng = np.random.default_rng(seed)
        dws = rng.standard_normal((steps, c)) * math.sqrt(h)
    times, path, covs = _simulate(spec, state0, duration, dt,
                                  lambda k, _: dws[k][None, :], 1)
    return Trajectory(times, path[:, 0, :], covs)


def simulate_ensemble(spec, state0, duration, dt, n_paths, seed):
    """Final displacements of ``n_paths`` independent conditional trajectories.

    Returns ``(displacements, covariance)`` where ``displacements`` has shape
    ``(n_paths, 2a)`` and ``covariance`` is the (shared, deterministic)
    conditional covariance at the final time.
    """
    rng = np.random.default_rng(seed)
    c = spec.monitored_count
    _, path, covs = _simulate(
        spec, state0, duration, dt,
        lambda k, h: rng.standard_normal((n_paths, c)) * math.sqrt(h), n_paths,
        keep_path=False)
    return path[-1], covs[-1]
