"""Exception hierarchy.

Two families: :class:`ConfigurationError` for inputs that cannot describe a
valid physical setup, and :class:`NumericalFailure` for computations that ran
out of precision or failed to converge. The CLI maps them to exit codes 2 and 3.
"""


class JCError(Exception):
    """Base class for all package errors."""


class ConfigurationError(JCError, ValueError):
    pass


class NumericalFailure(JCError, ArithmeticError):
    pass


class InvalidDistribution(ConfigurationError):
    """Negative, non-finite or zero-mass photon-number weights."""


class DegenerateState(ConfigurationError):
    """The requested field state has no representable distribution."""


class InvalidModel(ConfigurationError):
    pass


class WindowViolation(ConfigurationError):
    """Time lies outside the window where the product-state prediction applies."""


class PeakMismatch(ConfigurationError):
    """The two field components of an entangled state are not peaked together."""


class EmptyDesign(ConfigurationError):
    """The design recursion hit a pole before producing any weight beyond n = 0."""


class NumericalInstability(NumericalFailure):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NormalizationError(NumericalFailure):
    pass


class TruncationLeak(NumericalFailure):
    """Probability reaches the top of the truncated Fock space."""


class QuadratureNoConvergence(NumericalFailure):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (estimated error {error_estimate:.3e})")
        self.error_estimate = error_estimate


class UnnormalizableDesign(NumericalFailure):
    pass
