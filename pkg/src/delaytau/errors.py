"""Exception hierarchy shared by all delaytau modules."""


class DelayTauError(Exception):
    """Base class for every error raised by delaytau."""


class ParameterError(DelayTauError, ValueError):
    """Invalid basis or system parameters."""


class DomainError(DelayTauError, ValueError):
    """Argument outside the interval [-tau, 0] (or another stated domain)."""


class ConfigError(DelayTauError, ValueError):
    """Inconsistent user configuration (CLI or builder arguments)."""


class PreconditionError(DelayTauError, ValueError):
    """An operation was called outside the setting it is defined for."""


class NumericalError(DelayTauError, ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""


class SingularMatrixError(NumericalError):
    """Matrix is singular to working precision.

    Attributes
    ----------
    pivot : float
        Magnitude of the smallest pivot encountered in the factorization.
    """

    def __init__(self, message, pivot=0.0):
        super().__init__(message)
        self.pivot = float(pivot)


class PoleError(SingularMatrixError):
    """Evaluation point is (numerically) a pole or characteristic root."""


class DegenerateBasisError(NumericalError):
    """phi_N(0) vanishes numerically, so the tau pencil cannot be formed."""


class MeshError(NumericalError):
    """Collocation mesh has coincident or out-of-range nodes."""


class StabilityError(NumericalError):
    """A quantity that requires exponential stability was requested for an
    unstable (or marginal) realization."""


class RefinementError(NumericalError):
    """Newton refinement of a characteristic root did not converge.

    Attributes
    ----------
    last : complex
        The final iterate.
    """

    def __init__(self, message, last):
        super().__init__(message)
        self.last = complex(last)


class SpectralConditionError(NumericalError):
    """The Lyapunov operator is singular: two pencil eigenvalues sum to zero."""
