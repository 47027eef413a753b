"""Exception types shared across the package."""


class GraphRankError(Exception):
    """Base class for every error this library raises on purpose."""


class ParseError(GraphRankError):
    """Malformed edge-list or weights input; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(GraphRankError):
    """An argument violates a documented precondition or invariant."""


class SingularMatrixError(GraphRankError):
    """Pivot collapse while inverting or solving a dense system."""


class SpectralGuardError(GraphRankError):
    """Spectral-radius estimate too large for the matrix-log series."""


class ConvergenceError(GraphRankError):
    """An iterative solve failed to certify the requested tolerance."""
