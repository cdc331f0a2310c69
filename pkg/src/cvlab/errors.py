"""Exception hierarchy shared by every module of the lab."""


class CvlabError(Exception):
    """Base class for all errors raised by cvlab."""


class DomainError(CvlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(CvlabError):
    """A brute-force bound would be exceeded."""


class ConditioningError(CvlabError, ArithmeticError):
    """A per-node metric is too close to singular to invert."""


class DegenerateDenominatorError(CvlabError, ArithmeticError):
    """A quotient curvature denominator vanishes somewhere on the grid."""


class DegeneracyError(CvlabError, ArithmeticError):
    """A total-curvature factor is not admissible for the requested power."""


class AmplitudeError(CvlabError):
    """A perturbed metric left the admissible neighbourhood of the background."""


class ConvergenceError(CvlabError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


class PreconditionError(CvlabError):
    """An input does not satisfy the stated precondition of a formula."""


class ConfigError(CvlabError, ValueError):
    """Invalid configuration."""
