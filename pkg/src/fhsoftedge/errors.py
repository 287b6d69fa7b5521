"""Exception hierarchy shared by the numerical modules and the CLI."""


class FHError(Exception):
    """Base class; ``diagnostics`` carries solver-specific details."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ValidationError(FHError, ValueError):
    """Invalid parameters or inputs."""


class SolverError(FHError, RuntimeError):
    """A nonlinear solve or ODE integration failed."""


class BreakdownError(SolverError):
    """Orthogonal polynomials do not exist (or are ill-conditioned) at some degree."""


class PrecisionError(FHError, ArithmeticError):
    """An error estimate exceeded the requested tolerance."""
