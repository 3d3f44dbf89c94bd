"""Exception types shared across the library."""


class SymheatError(Exception):
    """Base class for all library-specific errors."""


class CutLocusError(SymheatError):
    """Logarithmic map requested at (or numerically on) the cut locus."""


class SingularError(SymheatError):
    """Radial formula evaluated on a chamber wall where it is singular."""


class SeriesOverflowError(SymheatError):
    """A series representation is invalid at the requested time.

    Raised when a term exceeds the overflow threshold before cancellation,
    or when the truncated tail has visibly not converged.  Either way the
    representation cannot be trusted at this time value and the caller
    should dispatch to a small-time representation instead.
    """


class TangencyError(SymheatError):
    """A vector violates the tangent-space invariants of its base point."""


class CalibrationError(SymheatError):
    """No candidate constants bring two kernel representations into agreement."""


class MaxTriesExceeded(SymheatError):
    """Rejection sampler exhausted its retry budget."""


class OdeStepError(SymheatError):
    """Adaptive ODE solver underflowed its step size."""


class IntegrationError(SymheatError):
    """Likelihood or flow integration failed to converge."""
