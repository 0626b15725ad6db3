"""Custom exceptions for stokesbddc."""

from __future__ import annotations

from typing import Any, Optional


class StokesBDDCError(Exception):
    """Base exception for all stokesbddc errors."""
    pass


class ValidationError(StokesBDDCError):
    """Raised when an argument fails validation."""

    def __init__(self, message: str, field: str = "") -> None:
        self.field = field
        super().__init__(f"Validation error: {message}" + (f" (field: {field})" if field else ""))


class ConfigurationError(StokesBDDCError):
    """Raised when configuration is invalid."""

    def __init__(self, message: str, parameter: str = "") -> None:
        self.parameter = parameter
        super().__init__(f"Configuration error: {message}" + (f" (parameter: {parameter})" if parameter else ""))


class IndexBoundsError(StokesBDDCError):
    """Raised when an assembly triplet addresses a position outside the matrix."""

    def __init__(self, message: str, index: int = -1, bound: int = -1) -> None:
        self.index = index
        self.bound = bound
        super().__init__(
            f"Index out of bounds: {message}"
            + (f" (index {index}, bound {bound})" if index >= 0 else "")
        )


class DimensionError(StokesBDDCError):
    """Raised when operand sizes do not match."""

    def __init__(self, operation: str, expected: Any, actual: Any) -> None:
        self.operation = operation
        self.expected = expected
        self.actual = actual
        super().__init__(f"Dimension mismatch in {operation}: expected {expected}, got {actual}")


class SingularMatrixError(StokesBDDCError):
    """Raised when a factorization meets a (numerically) zero pivot."""

    def __init__(self, message: str, pivot_index: Optional[int] = None) -> None:
        self.pivot_index = pivot_index
        super().__init__(
            f"Singular matrix: {message}"
            + (f" (pivot {pivot_index})" if pivot_index is not None else "")
        )


class InteriorFactorError(SingularMatrixError):
    """Raised when a subdomain interior block cannot be factored."""

    def __init__(self, subdomain: int, pivot_index: Optional[int] = None) -> None:
        self.subdomain = subdomain
        super().__init__(f"interior block of subdomain {subdomain} is singular", pivot_index)


class CoarseProblemError(SingularMatrixError):
    """Raised when the constrained virtual problem is singular."""

    def __init__(self, constraints: str, pivot_index: Optional[int] = None) -> None:
        self.constraints = constraints
        super().__init__(
            f"augmented virtual matrix with constraints '{constraints}' is singular; "
            "select more corner nodes or add edge/face constraints",
            pivot_index,
        )


class FactorizationStateError(StokesBDDCError):
    """Raised when a solve is requested from an object that holds no factorization."""

    def __init__(self, message: str) -> None:
        super().__init__(f"Factorization state error: {message}")


class DivergenceError(StokesBDDCError):
    """Raised when a Krylov iterate becomes NaN or infinite."""

    def __init__(self, method: str, iteration: float) -> None:
        self.method = method
        self.iteration = iteration
        super().__init__(f"{method} diverged: non-finite values at iteration {iteration}")


class BreakdownError(StokesBDDCError):
    """Raised when a Krylov recurrence breaks down; carries the partial result."""

    def __init__(self, method: str, iteration: float, result: Any = None, reason: str = "") -> None:
        self.method = method
        self.iteration = iteration
        self.result = result
        super().__init__(
            f"{method} breakdown at iteration {iteration}" + (f": {reason}" if reason else "")
        )


class IlutFactorError(StokesBDDCError):
    """Raised when ILUT meets a zero pivot it cannot replace."""

    def __init__(self, message: str, row: int = -1) -> None:
        self.row = row
        super().__init__(f"ILUT error: {message}" + (f" (row {row})" if row >= 0 else ""))


class IOError(StokesBDDCError):
    """Raised when writing an output file fails."""

    def __init__(self, message: str, file_path: str = "") -> None:
        self.file_path = file_path
        super().__init__(f"I/O error: {message}" + (f" ({file_path})" if file_path else ""))
