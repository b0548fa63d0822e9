import itertools
import math
import warnings

import numpy as np
import pytest

from gaussqueeze.cascaded import (CascadedParams, entanglement_criterion, epr_transform,
                                  make_cascaded_rwa_spec, make_cascaded_spec,
                                  make_rwa_epr_specs, mediated_coefficients,
                                  mediated_hamiltonian)
from gaussqueeze.engine import build_matrices, is_physical, steady_covariance
from gaussqueeze.errors import AsymmetricParams
from gaussqueeze.optimize import theta_opt_conditional, theta_opt_unconditional
from gaussqueeze.single_mode import InteractionParams, conditional_steady, unconditional_steady

SQ2 = math.sqrt(2)


def ladder(mode, dagger=False):
    v = np.zeros(4, complex)
    v[2 * mode] = 1 / SQ2
    v[2 * mode + 1] = (-1j if dagger else 1j) / SQ2
    return v


def quadratic_form(pairs):
    """Real symmetric M of sum c * (op1 op2) given as vectors, symmetrised by hand."""
    k = sum(c * np.outer(u, w) for c, u, w in pairs)
    m = k + k.T
    assert np.max(np.abs(m.imag)) < 1e-12
    return m.real


# -- parameters ------------------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        CascadedParams((1, 1), (0, 0), (1, 1), (0, 0), g=0.0)
    with pytest.raises(ValueError):
        CascadedParams((1, 1), (0, 0), (1, -1), (0, 0), g=1.0)
    with pytest.raises(ValueError):
        CascadedParams((1,), (0, 0), (1, 1), (0, 0), g=1.0)
    with pytest.raises(ValueError):
        CascadedParams((1, 1), (0, 0), (1, 1), (0, 0), g=1.0, epsilon=2.0)


def test_rwa_warning_threshold():
    with pytest.warns(UserWarning, match="rotating-wave"):
        CascadedParams.symmetric(0.1, 50.0, omega=100.0, rwa=True)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        CascadedParams.symmetric(0.1, 50.0, omega=1e4, rwa=True)


# -- mediated interaction --------------------------------------------------

def test_symmetric_coupling_is_pure_beam_splitter():
    tms, bs = mediated_coefficients((0.8, 0.8), (0.6, 0.6))
    assert tms == 0.0 and bs == pytest.approx(0.48)


def test_qnd_to_conjugate_coupling_coefficient():
    tms, bs = mediated_coefficients((1.0, 0.0), (0.0, 1.0))
    assert tms == -0.5 and bs == 0.5


@pytest.mark.parametrize("alpha,beta", [((0.8, 0.3), (0.6, -0.95)), ((1.0, 0.0), (0.0, 1.0)),
                                        ((0.5, 0.5), (0.2, 0.2))])
def test_mediated_hamiltonian_matches_expansion(alpha, beta):
    g = 2.3
    p = CascadedParams(alpha, beta, (1, 1), (0, 0), g)
    tms, bs = mediated_coefficients(alpha, beta)
    a1, a2, a1d, a2d = ladder(0), ladder(1), ladder(0, True), ladder(1, True)
    pre = -0.5j * g
    expect = quadratic_form([(pre * tms, a1, a2), (-pre * tms, a1d, a2d),
                             (pre * bs, a1, a2d), (-pre * bs, a1d, a2)])
    np.testing.assert_allclose(mediated_hamiltonian(p), expect, atol=1e-12)


def test_beam_splitter_purity_whenever_products_match():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a1, b1, s = rng.normal(size=3)
        tms, _ = mediated_coefficients((a1, s * a1), (b1, s * b1))
        assert abs(tms) < 1e-15


def test_vanishing_coupling_leaves_thermal_rotating_modes():
    p = CascadedParams.symmetric(0.3, 1e-12, n=1.0, omega=2.0)
    dd = build_matrices(make_cascaded_spec(p))
    local = np.kron(np.diag([1.0, -1.0]), np.array([[0.0, 2.0], [-2.0, 0.0]])) - 0.5 * np.eye(4)
    np.testing.assert_allclose(dd.drift, local, atol=1e-10)
    np.testing.assert_allclose(dd.diffusion, 3 * np.eye(4), atol=1e-10)


# -- EPR factorisation -----------------------------------------------------

def test_epr_transform_vacuum():
    plus, minus, cross = epr_transform(np.eye(4))
    np.testing.assert_allclose(plus, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(minus, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(cross, 0, atol=1e-15)


def test_epr_transform_two_mode_squeezed_state():
    r = 0.7
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    cov = np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])
    assert is_physical(cov)
    plus, minus, _ = epr_transform(cov)
    assert plus[0, 0] == pytest.approx(math.exp(2 * r))
    assert minus[0, 0] == pytest.approx(math.exp(-2 * r)) and minus[1, 1] == pytest.approx(math.exp(2 * r))
    # correlations <X1 X2> < 0 squeeze X-; flip the sign for X+
    flipped = cov * np.array([[1, 1, -1, -1], [1, 1, -1, -1], [-1, -1, 1, 1], [-1, -1, 1, 1]])
    assert epr_transform(flipped)[0][0, 0] < 1


def test_epr_transform_rejects_wrong_shape():
    with pytest.raises(ValueError):
        epr_transform(np.eye(2))


def test_entanglement_criterion_boundary():
    total, ent = entanglement_criterion(np.eye(2), np.eye(2))
    assert total == 2.0 and ent is False
    total, ent = entanglement_criterion(np.diag([0.5, 2.0]), np.diag([2.0, 0.5]))
    assert total == 1.0 and ent is True


GRID = list(itertools.product([-0.3, 0.0, 0.3], [2.0, 5.0, 50.0], [0.0, 1.0], [0.05, 0.5]))


@pytest.mark.parametrize("theta,d,n,eps", GRID)
def test_factorisation_and_single_mode_equivalence(theta, d, n, eps):
    p = CascadedParams.symmetric(theta, d, n, eps)
    plus, minus, cross = epr_transform(steady_covariance(make_cascaded_rwa_spec(p)).covariance)
    assert np.max(np.abs(cross)) < 1e-8
    ref = conditional_steady(InteractionParams(theta, d, n, eps))
    np.testing.assert_allclose(np.diag(plus), [ref.v_squeezed, ref.u_antisqueezed], rtol=1e-8)
    np.testing.assert_allclose(np.diag(minus), [ref.u_antisqueezed, ref.v_squeezed], rtol=1e-8)
    spec_p, spec_m = make_rwa_epr_specs(p)
    np.testing.assert_allclose(steady_covariance(spec_p).covariance, plus, rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(steady_covariance(spec_m).covariance, minus, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("theta,d,n", [(0.3, 5.0, 0.0), (0.1, 50.0, 1.0)])
def test_unconditional_factorisation(theta, d, n):
    p = CascadedParams.symmetric(theta, d, n)
    plus, minus, cross = epr_transform(steady_covariance(make_cascaded_rwa_spec(p), False).covariance)
    ref = unconditional_steady(InteractionParams(theta, d, n))
    assert np.max(np.abs(cross)) < 1e-8
    assert plus[0, 0] == pytest.approx(ref.v_squeezed, rel=1e-8)
    assert minus[1, 1] == pytest.approx(ref.v_squeezed, rel=1e-8)


def test_minus_spec_is_relabelled_plus_spec():
    p = CascadedParams.symmetric(0.2, 10.0, 0.5, 0.3)
    spec_p, spec_m = make_rwa_epr_specs(p)
    swap = np.array([[0, 1], [-1, 0]])   # (X, P) -> (P, -X)
    plus = steady_covariance(spec_p).covariance
    minus = steady_covariance(spec_m).covariance
    np.testing.assert_allclose(swap @ minus @ swap.T, plus, rtol=1e-12, atol=1e-14)


def test_qnd_epr_specs_measure_x_plus_and_p_minus():
    p = CascadedParams.symmetric(0.0, 5.0)
    spec_p, spec_m = make_rwa_epr_specs(p)
    assert spec_p.jump_vectors[0][1] == 0 and spec_p.jump_vectors[0][0] != 0
    assert spec_m.jump_vectors[0][0] == 0 and spec_m.jump_vectors[0][1] != 0


def test_asymmetric_params_rejected():
    p = CascadedParams((1.0, 0.9), (0.0, 0.1), (1, 1), (0, 0), 5.0)
    with pytest.raises(AsymmetricParams):
        make_rwa_epr_specs(p)
    with pytest.raises(AsymmetricParams):
        p.single_mode_params()


def test_lab_frame_converges_to_rwa():
    d = 50.0
    theta = theta_opt_unconditional(d).theta_opt
    target = conditional_steady(InteractionParams(theta, d)).v_squeezed
    gaps = []
    for ratio in (10, 100, 1000):
        p = CascadedParams.symmetric(theta, d, omega=ratio * d)
        plus, minus, _ = epr_transform(steady_covariance(make_cascaded_spec(p)).covariance)
        gaps.append(max(abs(plus[0, 0] - target), abs(minus[1, 1] - target)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-6


def test_entangled_at_good_angle_and_not_above_critical_occupation():
    d = 50.0
    theta = theta_opt_unconditional(d).theta_opt
    p = CascadedParams.symmetric(theta, d)
    plus, minus, _ = epr_transform(steady_covariance(make_cascaded_rwa_spec(p)).covariance)
    assert entanglement_criterion(plus, minus)[1]
    n_hot = 1.1 * d * (1 + SQ2) / 4
    theta_hot = theta_opt_conditional(d, n_hot, 0.05).theta_opt
    hot = CascadedParams.symmetric(theta_hot, d, n_hot, 0.05)
    plus, minus, _ = epr_transform(steady_covariance(make_cascaded_rwa_spec(hot)).covariance)
    total, ent = entanglement_criterion(plus, minus)
    assert not ent and total > 2
