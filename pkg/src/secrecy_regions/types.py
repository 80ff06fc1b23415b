"""
Core types for secrecy-regions.

Implements Result types for explicit error handling at the package boundaries
(file loading, command runners) and the immutable error values shared by every
module. Deep numerical code raises ``SecrecyError`` carrying one of these
values; boundaries turn it back into ``Err``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto
from typing import Callable, Generic, Literal, TypeVar

T = TypeVar("T")
U = TypeVar("U")
E = TypeVar("E")


# =============================================================================
# Result Type - Explicit Error Handling
# =============================================================================


@dataclass(frozen=True, slots=True)
class Ok(Generic[T]):
    """Represents a successful result containing a value."""

    value: T

    def is_ok(self) -> bool:
        return True

    def is_err(self) -> bool:
        return False

    def map(self, fn: Callable[[T], U]) -> Result[U, E]:
        """Apply a function to the contained value if Ok."""
        return Ok(fn(self.value))

    def unwrap(self) -> T:
        """Get the value. Safe to call on Ok."""
        return self.value

    def unwrap_or(self, default: T) -> T:
        """Get the value or return default."""
        return self.value


@dataclass(frozen=True, slots=True)
class Err(Generic[E]):
    """Represents a failed result containing an error."""

    error: E

    def is_ok(self) -> bool:
        return False

    def is_err(self) -> bool:
        return True

    def map(self, fn: Callable[[T], U]) -> Result[U, E]:
        """Return self unchanged since this is an error."""
        return self  # type: ignore

    def unwrap(self) -> T:
        """Raise the carried error as a SecrecyError."""
        raise SecrecyError(self.error)  # type: ignore[arg-type]

    def unwrap_or(self, default: T) -> T:
        """Return the default since this is an error."""
        return default


# Union type for Result
Result = Ok[T] | Err[E]


# =============================================================================
# Units
# =============================================================================

RateUnit = Literal["bits", "nats"]

SUPPORTED_UNITS: tuple[RateUnit, ...] = ("bits", "nats")


# =============================================================================
# Error Types - Immutable, Exhaustive
# =============================================================================


class ErrorKind(Enum):
    """Enumeration of all possible error kinds."""

    VALIDATION_ERROR = auto()
    DIMENSION_MISMATCH = auto()
    USAGE_ERROR = auto()
    BUDGET_EXCEEDED = auto()
    NUMERICAL_ERROR = auto()
    DOMAIN_ERROR = auto()
    CONSTRUCTION_ERROR = auto()


@dataclass(frozen=True, slots=True)
class ValidationError:
    """Input failed validation (bad probabilities, out-of-range parameters)."""

    field: str
    message: str

    @property
    def kind(self) -> ErrorKind:
        return ErrorKind.VALIDATION_ERROR


@dataclass(frozen=True, slots=True)
class DimensionMismatch:
    """Alphabet sizes of two objects do not line up."""

    operation: str
    expected: int
    actual: int

    @property
    def kind(self) -> ErrorKind:
        return ErrorKind.DIMENSION_MISMATCH


@dataclass(frozen=True, slots=True)
class UsageError:
    """An operation was called with arguments that make no sense together."""

    message: str

    @property
    def kind(self) -> ErrorKind:
        return ErrorKind.USAGE_ERROR


@dataclass(frozen=True, slots=True)
class BudgetExceeded:
    """An exact enumeration would exceed the configured budget."""

    resource: str
    requested: float
    limit: float

    @property
    def kind(self) -> ErrorKind:
        return ErrorKind.BUDGET_EXCEEDED


@dataclass(frozen=True, slots=True)
class NumericalError:
    """An iterative or adaptive routine did not reach its tolerance."""

    routine: str
    achieved: float
    requested: float

    @property
    def kind(self) -> ErrorKind:
        return ErrorKind.NUMERICAL_ERROR


@dataclass(frozen=True, slots=True)
class DomainError:
    """A closed form was evaluated where its assumptions fail."""

    quantity: str
    at: float
    details: str = ""

    @property
    def kind(self) -> ErrorKind:
        return ErrorKind.DOMAIN_ERROR


@dataclass(frozen=True, slots=True)
class ConstructionError:
    """A codebook structure could not be built as planned."""

    details: str

    @property
    def kind(self) -> ErrorKind:
        return ErrorKind.CONSTRUCTION_ERROR


# Union of all errors
Error = (
    ValidationError
    | DimensionMismatch
    | UsageError
    | BudgetExceeded
    | NumericalError
    | DomainError
    | ConstructionError
)


class SecrecyError(Exception):
    """Exception carrying an immutable error value out of numerical code."""

    def __init__(self, error: Error) -> None:
        super().__init__(format_error_message(error))
        self.error = error


def fail(error: Error) -> SecrecyError:
    """Wrap an error value so numerical code can ``raise fail(...)``."""
    return SecrecyError(error)


# =============================================================================
# User-Friendly Error Messages
# =============================================================================


def format_error_message(error: Error) -> str:
    """Convert an error value to a user-facing message."""
    match error:
        case ValidationError(field=field, message=message):
            return f"Invalid {field}: {message}"
        case DimensionMismatch(operation=op, expected=expected, actual=actual):
            return f"{op}: expected alphabet size {expected}, got {actual}"
        case UsageError(message=message):
            return f"Usage error: {message}"
        case BudgetExceeded(resource=resource, requested=requested, limit=limit):
            return (
                f"Refusing to enumerate {resource}: {requested:g} exceeds the budget of {limit:g}"
            )
        case NumericalError(routine=routine, achieved=achieved, requested=requested):
            return f"{routine} stopped at tolerance {achieved:.3g} (requested {requested:.3g})"
        case DomainError(quantity=quantity, at=at, details=details):
            suffix = f" ({details})" if details else ""
            return f"{quantity} is undefined at {at:g}{suffix}"
        case ConstructionError(details=details):
            return f"Codebook construction failed: {details}"
        case _:
            return "Something went wrong."


EXIT_CODES: dict[ErrorKind, int] = {
    ErrorKind.VALIDATION_ERROR: 1,
    ErrorKind.DIMENSION_MISMATCH: 1,
    ErrorKind.USAGE_ERROR: 1,
    ErrorKind.DOMAIN_ERROR: 1,
    ErrorKind.CONSTRUCTION_ERROR: 1,
    ErrorKind.BUDGET_EXCEEDED: 2,
    ErrorKind.NUMERICAL_ERROR: 2,
}
