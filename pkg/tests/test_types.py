"""Tests for the types module."""

import pytest

from secrecy_regions.types import (
    EXIT_CODES,
    BudgetExceeded,
    ConstructionError,
    DimensionMismatch,
    DomainError,
    Err,
    ErrorKind,
    NumericalError,
    Ok,
    SecrecyError,
    UsageError,
    ValidationError,
    fail,
    format_error_message,
)


class TestResult:
    """Tests for Result type (Ok/Err)."""

    def test_ok_is_ok(self):
        result = Ok("value")
        assert result.is_ok() is True
        assert result.is_err() is False

    def test_err_is_err(self):
        result = Err(UsageError("bad"))
        assert result.is_ok() is False
        assert result.is_err() is True

    def test_ok_unwrap(self):
        assert Ok("value").unwrap() == "value"

    def test_err_unwrap_raises_carrying_error(self):
        error = ValidationError(field="n", message="must be >= 1")
        with pytest.raises(SecrecyError) as info:
            Err(error).unwrap()
        assert info.value.error is error

    def test_unwrap_or(self):
        assert Ok("value").unwrap_or("default") == "value"
        assert Err(UsageError("x")).unwrap_or("default") == "default"

    def test_ok_map(self):
        mapped = Ok(5).map(lambda x: x * 2)
        assert isinstance(mapped, Ok)
        assert mapped.unwrap() == 10

    def test_err_map(self):
        error = UsageError("x")
        mapped = Err(error).map(lambda x: x * 2)
        assert isinstance(mapped, Err)
        assert mapped.error is error

    def test_ok_is_frozen(self):
        result = Ok("value")
        with pytest.raises(AttributeError):
            result.value = "new_value"  # type: ignore


class TestErrorTypes:
    """Tests for error values and their kinds."""

    @pytest.mark.parametrize(
        "error, kind",
        [
            (ValidationError("f", "m"), ErrorKind.VALIDATION_ERROR),
            (DimensionMismatch("op", 2, 3), ErrorKind.DIMENSION_MISMATCH),
            (UsageError("m"), ErrorKind.USAGE_ERROR),
            (BudgetExceeded("z^n", 30.0, 24.0), ErrorKind.BUDGET_EXCEEDED),
            (NumericalError("simpson", 1e-6, 1e-9), ErrorKind.NUMERICAL_ERROR),
            (DomainError("I", 0.5), ErrorKind.DOMAIN_ERROR),
            (ConstructionError("empty bin"), ErrorKind.CONSTRUCTION_ERROR),
        ],
    )
    def test_kind(self, error, kind):
        assert error.kind is kind

    def test_errors_are_frozen(self):
        error = BudgetExceeded("z^n", 30.0, 24.0)
        with pytest.raises(AttributeError):
            error.limit = 100.0  # type: ignore

    def test_fail_wraps(self):
        error = UsageError("m")
        assert fail(error).error is error


class TestFormatErrorMessage:
    """Tests for format_error_message function."""

    def test_validation_message(self):
        message = format_error_message(ValidationError(field="power", message="must be > 0"))
        assert "power" in message
        assert "must be > 0" in message

    def test_budget_message(self):
        message = format_error_message(BudgetExceeded("output sequences (bits)", 30.0, 24.0))
        assert "30" in message
        assert "24" in message

    def test_dimension_message(self):
        message = format_error_message(DimensionMismatch("compose", 2, 3))
        assert "compose" in message

    def test_domain_details(self):
        message = format_error_message(DomainError("x1", 2.0, "no sign change"))
        assert "no sign change" in message

    def test_exception_message_matches(self):
        error = ConstructionError("empty bin")
        assert str(SecrecyError(error)) == format_error_message(error)


class TestExitCodes:
    """Exit code mapping of the command line."""

    def test_every_kind_has_a_code(self):
        assert set(EXIT_CODES) == set(ErrorKind)

    def test_refusals_exit_two(self):
        assert EXIT_CODES[ErrorKind.BUDGET_EXCEEDED] == 2
        assert EXIT_CODES[ErrorKind.NUMERICAL_ERROR] == 2

    def test_invalid_input_exits_one(self):
        assert EXIT_CODES[ErrorKind.VALIDATION_ERROR] == 1
        assert EXIT_CODES[ErrorKind.USAGE_ERROR] == 1
