########################
# Exception Hierarchy  #
########################

from typing import Optional


class CoalgebraError(Exception):
    """
    Base exception class for trace-semantics errors.

    All custom exceptions raised by the library and the command-line front end
    inherit from this class, allowing for unified error handling.
    """
    pass


class ValidationError(CoalgebraError):
    """
    Raised when input validation fails.

    Triggered by values that break an invariant of a domain type, such as a
    floating point probability, a distribution whose mass exceeds 1, a negative
    depth, or a transition that refers to an undeclared symbol.
    """
    pass


class ParseError(ValidationError):
    """
    Raised when a system file, word or functor expression cannot be parsed.

    Carries the 1-based line and column of the offending token when known.
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        if line is None:
            super().__init__(message)
        elif column is None:
            super().__init__(f"line {line}: {message}")
        else:
            super().__init__(f"line {line}, column {column}: {message}")


class MonadError(CoalgebraError):
    """
    Raised when branching values are combined inconsistently.

    Used for tag mismatches between monads, joins of incomparable values and
    arguments that are not branching values at all.
    """
    pass


class ShapeError(CoalgebraError):
    """
    Raised when a transition structure does not match its functor expression.
    """
    pass


class UnsupportedSystemError(CoalgebraError):
    """
    Raised when an operation is applied to a system of the wrong kind.

    For example, the labelled-transition oracle only accepts powerset systems
    over the word functor 1 + A * X.
    """
    pass


class UnknownStateError(CoalgebraError):
    """
    Raised when a state name is not part of the system.
    """
    pass


class OperationError(CoalgebraError):
    """
    Raised when a command fails during execution.

    Unexpected exceptions inside a command are wrapped in this error by the
    session so that the command-line front end reports them uniformly.
    """
    pass


class ConfigurationError(CoalgebraError):
    """
    Raised when the trace configuration is invalid.

    Triggered when there are issues with configuration settings, such as a
    negative list cap or a non-positive number of law samples.
    """
    pass
