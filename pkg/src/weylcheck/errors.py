"""Exception hierarchy."""


class WeylCheckError(Exception):
    """Base class for all errors raised by weylcheck."""


class ContractError(WeylCheckError, ValueError):
    """Inputs violate an operation's contract (valence mismatch, bad shape)."""


class SingularChartError(WeylCheckError):
    """Evaluation requested at or too close to a singular locus of a chart."""


class PreconditionError(WeylCheckError):
    """A geometric hypothesis required by an operation does not hold."""


class UnsupportedError(WeylCheckError):
    """The operation is not defined for this dimension or chart type."""


class SolverError(WeylCheckError):
    """An iterative solver failed to reach its target residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InconsistentHodgeData(WeylCheckError, ValueError):
    """Hodge number inputs contradict the generalized Hopf relations."""
