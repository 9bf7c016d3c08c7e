import pytest
from app.exceptions import (
    CoalgebraError,
    ConfigurationError,
    MonadError,
    OperationError,
    ParseError,
    ShapeError,
    UnknownStateError,
    UnsupportedSystemError,
    ValidationError,
)

# Test cases for the CoalgebraError hierarchy

def test_coalgebra_error_is_base_exception():
    with pytest.raises(CoalgebraError) as exc_info:
        raise CoalgebraError("Base error occurred")
    assert str(exc_info.value) == "Base error occurred"

@pytest.mark.parametrize("error_class", [
    ValidationError,
    ParseError,
    MonadError,
    ShapeError,
    UnsupportedSystemError,
    UnknownStateError,
    OperationError,
    ConfigurationError,
])
def test_every_error_is_a_coalgebra_error(error_class):
    with pytest.raises(CoalgebraError) as exc_info:
        raise error_class("failed")
    assert isinstance(exc_info.value, error_class)
    assert str(exc_info.value) == "failed"

def test_parse_error_is_validation_error():
    assert issubclass(ParseError, ValidationError)

def test_parse_error_with_line_and_column():
    error = ParseError("Undeclared state: z", line=7, column=12)
    assert str(error) == "line 7, column 12: Undeclared state: z"
    assert error.line == 7
    assert error.column == 12
    assert error.message == "Undeclared state: z"

def test_parse_error_with_line_only():
    assert str(ParseError("Missing probability", line=3)) == "line 3: Missing probability"

def test_parse_error_without_position():
    error = ParseError("Missing 'monad =' in [system]")
    assert str(error) == "Missing 'monad =' in [system]"
    assert error.line is None and error.column is None

def test_catching_base_class_catches_specific_errors():
    try:
        raise ShapeError("Expected a pair")
    except CoalgebraError as e:
        assert isinstance(e, ShapeError)
