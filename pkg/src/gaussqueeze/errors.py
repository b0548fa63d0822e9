"""Exception hierarchy shared by all modules."""


class GaussSqueezeError(Exception):
    """Base class for every error raised by the package."""


class NonHermitianInput(GaussSqueezeError):
    """Hamiltonian matrix is not symmetric within tolerance."""


class DimensionMismatch(GaussSqueezeError):
    """Array shapes are inconsistent with the number of modes."""


class NumericalFailure(GaussSqueezeError):
    """Base class for failures of a numerical procedure."""


class DivergenceDetected(NumericalFailure):
    """Covariance blew past the divergence threshold (dynamically unstable)."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NoConvergence(NumericalFailure):
    """A steady state was not reached within the allotted time/iterations."""


class UnstableRegime(NumericalFailure):
    """Unconditional dynamics has no steady state for these parameters."""


class AntisqueezingUnbounded(NumericalFailure):
    """A conditional variance has no finite steady state.

    The partially valid result (finite squeezed variance, infinite
    antisqueezed one) is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class AsymmetricParams(GaussSqueezeError):
    """Cascaded parameters are not symmetric between the two modes."""


class FeedbackUnstable(NumericalFailure):
    """Feedback gains leave an effective decay rate non-positive."""


class NotStabilizable(NumericalFailure):
    """No feedback gain satisfies the stability condition."""
