"""Exception hierarchy shared by all modules."""


class HybridCoxError(Exception):
    """Base class."""


class DomainError(HybridCoxError, ValueError):
    """Input violates an operation's precondition."""


class SolverError(HybridCoxError, RuntimeError):
    """Numerical solve failed; carries the best residual reached."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class BudgetError(HybridCoxError, RuntimeError):
    """Search budget exhausted; carries partial coverage."""

    def __init__(self, message: str, partial=None, visited: int = 0):
        super().__init__(message)
        self.partial = partial if partial is not None else []
        self.visited = visited


class InconsistencyError(HybridCoxError, ValueError):
    """Numerical data disagrees with the combinatorics it claims to realize."""
