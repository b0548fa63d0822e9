import itertools
import math

import numpy as np
import pytest

from gaussqueeze.engine import build_matrices, evolve_covariance, steady_covariance
from gaussqueeze.errors import FeedbackUnstable, NotStabilizable
from gaussqueeze.feedback import FeedbackGains, feedback_spec, feedback_steady, optimal_gains
from gaussqueeze.optimize import theta_critical
from gaussqueeze.single_mode import (InteractionParams, conditional_steady, make_spec,
                                     unconditional_steady)

import oracles

GRID = list(itertools.product([-0.6, -0.3, 0.0, 0.3, 0.6], [2.0, 5.0, 50.0, 500.0],
                              [0.0, 1.0], [0.01, 0.05, 0.5]))


def test_zero_gain_is_unconditional():
    for theta, d, n in [(0.3, 5.0, 0.0), (0.0, 50.0, 2.0), (-0.1, 5.0, 1.0)]:
        p = InteractionParams(theta, d, n, 0.2)
        assert feedback_steady(p, FeedbackGains(0.0, 0.0)) == unconditional_steady(p)


def test_feedback_noise_only_adds_without_probe():
    p = InteractionParams(0.3, 1e-300, 1.0, 0.2)
    r = feedback_steady(p, FeedbackGains(0.7, 0.0))
    assert r.v_squeezed == pytest.approx(3 + 2 * 0.49, rel=1e-12)


def test_unstable_gain_rejected():
    p = InteractionParams(0.3, 5.0, 0.0, 0.2)
    with pytest.raises(FeedbackUnstable):
        feedback_steady(p, FeedbackGains(100.0, 0.0))


def test_optimal_gains_qnd_d5():
    p = InteractionParams(0.0, 5.0)
    gains = optimal_gains(p)
    assert feedback_steady(p, gains).v_squeezed == pytest.approx(oracles.vc_qnd_d5(), abs=1e-12)


def test_optimal_gains_d5_reflectivity():
    p = InteractionParams(0.2, 5.0, 0.0, 0.05)
    gains = optimal_gains(p)
    fb, c = feedback_steady(p, gains), conditional_steady(p)
    assert fb.v_squeezed == pytest.approx(c.v_squeezed, rel=1e-8)
    assert fb.u_antisqueezed == pytest.approx(c.u_antisqueezed, rel=1e-8)
    assert gains.residual < 1e-8


def test_gains_are_minimisers():
    p = InteractionParams(0.1, 50.0, 1.0, 0.05)
    best = optimal_gains(p)
    base = feedback_steady(p, best)
    for dx in (-1e-3, 1e-3):
        try:
            assert feedback_steady(p, FeedbackGains(best.xi1 + dx, best.xi2)).v_squeezed >= base.v_squeezed
            assert feedback_steady(p, FeedbackGains(best.xi1, best.xi2 + dx)).u_antisqueezed >= base.u_antisqueezed
        except FeedbackUnstable:
            pass


def test_not_stabilizable_below_stability_angle_without_second_detector():
    p = InteractionParams(theta_critical(5.0) - 0.05, 5.0)
    with pytest.raises(NotStabilizable, match="P quadrature"):
        optimal_gains(p)


def test_stabilised_below_stability_angle_with_reflectivity():
    p = InteractionParams(theta_critical(5.0) - 0.1, 5.0, 0.0, 0.05)
    gains = optimal_gains(p)
    fb = feedback_steady(p, gains)
    assert math.isfinite(fb.u_antisqueezed)
    assert 0.2 / 0.05 < fb.u_antisqueezed < 5 / 0.05


@pytest.mark.parametrize("theta,d,n,eps", GRID)
def test_conditional_recovery_and_engine_consistency(theta, d, n, eps):
    p = InteractionParams(theta, d, n, eps)
    gains = optimal_gains(p)
    fb, c = feedback_steady(p, gains), conditional_steady(p)
    assert fb.v_squeezed == pytest.approx(c.v_squeezed, rel=1e-8)
    assert fb.u_antisqueezed == pytest.approx(c.u_antisqueezed, rel=1e-8)
    cov = steady_covariance(feedback_spec(p, gains), conditional=False).covariance
    assert cov[0, 0] == pytest.approx(fb.v_squeezed, rel=1e-8)
    assert cov[1, 1] == pytest.approx(fb.u_antisqueezed, rel=1e-8)


def test_zero_gain_spec_equals_unmonitored_spec():
    p = InteractionParams(0.3, 5.0, 1.0, 0.2)
    a = build_matrices(feedback_spec(p, FeedbackGains(0.0, 0.0)))
    b = build_matrices(make_spec(p, conditional=False))
    np.testing.assert_allclose(a.drift, b.drift, atol=1e-14)
    np.testing.assert_allclose(a.diffusion, b.diffusion, atol=1e-14)


def test_off_optimal_gains_engine_consistency():
    p = InteractionParams(0.4, 20.0, 0.5, 0.3)
    gains = FeedbackGains(-0.3, 0.8)
    fb = feedback_steady(p, gains)
    cov = steady_covariance(feedback_spec(p, gains), conditional=False).covariance
    np.testing.assert_allclose(np.diag(cov), [fb.v_squeezed, fb.u_antisqueezed], rtol=1e-10)


def test_two_mode_squeezing_interaction_is_stabilised():
    p = InteractionParams(-math.pi / 4, 5.0, 0.0, 0.05)
    gains = optimal_gains(p)
    traj = evolve_covariance(feedback_spec(p, gains), np.eye(2), 40.0, dt=1e-2, conditional=False)
    c = conditional_steady(p)
    np.testing.assert_allclose(np.diag(traj.final), [c.v_squeezed, c.u_antisqueezed], rtol=1e-6)


def test_feedback_requires_zero_phase():
    with pytest.raises(ValueError):
        optimal_gains(InteractionParams(0.1, 5.0, 0.0, 0.1, phi=0.3))
