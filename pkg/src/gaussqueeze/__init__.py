"""Gaussian conditional and dissipative squeezing of probed oscillators.

Single- and two-mode bosonic systems coupled to a 1D light field, with
homodyne monitoring, thermal noise and photocurrent feedback.  Variances are
in shot-noise units (vacuum = 1).
"""

__version__ = "0.1.0"

from .errors import (AntisqueezingUnbounded, AsymmetricParams, DimensionMismatch,
                     DivergenceDetected, FeedbackUnstable, GaussSqueezeError,
                     NoConvergence, NonHermitianInput, NotStabilizable,
                     NumericalFailure, UnstableRegime)
from .engine import (DriftDiffusion, GaussianState, SystemSpec, build_matrices,
                     evolve_covariance, riccati_rhs, simulate_ensemble,
                     simulate_trajectory, steady_covariance)
from .single_mode import (InteractionParams, SteadyResult, conditional_rhs,
                          conditional_steady, make_spec, qnd_pulse_variance,
                          unconditional_steady, variance_curves)
from .cascaded import (CascadedParams, entanglement_criterion, epr_transform,
                       make_cascaded_rwa_spec, make_cascaded_spec, make_rwa_epr_specs)
from .optimize import (OptimumReport, critical_occupation, d_star, theta_critical,
                       theta_opt_conditional, theta_opt_unconditional)
from .feedback import FeedbackGains, feedback_spec, feedback_steady, optimal_gains
from .table import SweepTable
