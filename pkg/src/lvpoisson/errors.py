"""Exception hierarchy shared across the package."""


class LVPoissonError(Exception):
    """Base class for all package errors."""


class NotAntisymmetric(LVPoissonError):
    """Interaction matrix is not antisymmetric within tolerance."""


class NoPositiveFixedPoint(LVPoissonError):
    """The linear fixed-point system admits no strictly positive solution."""


class DomainError(LVPoissonError):
    """A state left the open positive quadrant."""


class StageDivergence(LVPoissonError):
    """The implicit stage equation could not be solved to tolerance.

    Usually means the time-step is too large for the stage equation to
    have a (reachable) solution.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class StepUnderflow(LVPoissonError):
    """Adaptive reference integration collapsed to a vanishing step."""


class SingularFormula(LVPoissonError):
    """Closed-form eigenvector formula evaluated at a pole."""


class NoConvergence(LVPoissonError):
    """Newton iteration for a periodic orbit did not converge."""


class SingularReduced(LVPoissonError):
    """Reduced shooting Jacobian is numerically singular."""


class ContinuationStall(LVPoissonError):
    """Orbit continuation failed; carries the last successful parameter."""

    def __init__(self, message, last_good=None, family=None):
        super().__init__(message)
        self.last_good = last_good
        self.family = family


class ParseError(LVPoissonError):
    """Config document could not be parsed."""


class ValidationError(LVPoissonError):
    """Config document parsed but violates an invariant."""


class FormatError(LVPoissonError):
    """Trajectory file has an unexpected layout."""


class IoError(LVPoissonError):
    """Filesystem-level read/write failure."""


class NotFound(LVPoissonError):
    """Unknown experiment or recipe name."""


class MissingArtifact(LVPoissonError):
    """Expected experiment output file is absent."""
