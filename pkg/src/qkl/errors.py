"""Exception types shared across the library and the CLI."""


class QklError(Exception):
    """Base class for all library errors."""


class DimensionError(QklError):
    """Matrix blocks have incompatible shapes."""


class ParameterError(QklError):
    """A physical parameter is outside its admissible range."""


class PreconditionError(QklError):
    """An operation was invoked on a system that violates its precondition."""


class ConfigurationError(QklError):
    """An experiment configuration is malformed or inconsistent."""


class ContractViolationError(QklError):
    """An interconnection feedthrough block violates the realizability contract."""


class SolverError(QklError):
    """Base class for numerical solver failures."""


class NoSteadyStateError(SolverError):
    """The drift matrix is not Hurwitz, so no steady state exists."""


class SingularInnovationError(SolverError):
    """The innovation covariance L Ka Ka^H L^H is numerically singular."""


class NoStabilizingSolutionError(SolverError):
    """No stabilizing Riccati solution exists for the given filter data."""


class ConvergenceError(SolverError):
    """Iteration failed to reach the requested residual; carries the best residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.residual = residual


class StepSizeError(SolverError):
    """Fixed-step integration blew up; the step size is too large."""


class UsageError(QklError):
    """Bad command-line usage, e.g. an unknown built-in experiment id."""
