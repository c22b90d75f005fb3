"""Exception types shared across the package."""


class CutoffError(ValueError):
    """Amplitude mass beyond a Fock cutoff exceeds the allowed tolerance."""


class DomainError(ValueError):
    """A parameter lies outside the domain where the model is defined."""


class NoRealRootError(ArithmeticError):
    """The gain equation has no admissible real root."""


class ConvergenceError(RuntimeError):
    """An iterative procedure failed to reach its tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class SingularNormalizerError(ArithmeticError):
    """The normalizer of an ascent step is not invertible."""


class ConfigError(ValueError):
    """An experiment configuration failed to parse or validate."""
