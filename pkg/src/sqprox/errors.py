"""Exception hierarchy shared by every sqprox module."""


class SqproxError(Exception):
    """Base class for all library errors."""


class InvalidPoint(SqproxError, ValueError):
    """A point does not belong to the space it was used with."""


class InvalidParameter(SqproxError, ValueError):
    """A numeric parameter is outside its admissible range."""


class InvalidSpace(SqproxError, ValueError):
    """A space description is malformed (e.g. a tree with a cycle)."""


class NonFiniteObjective(SqproxError, ArithmeticError):
    """An objective evaluation produced NaN or infinity."""


class UnsupportedSpace(SqproxError, NotImplementedError):
    """The requested routine has no implementation for this space."""


class PreconditionViolated(SqproxError, ValueError):
    """An input violates a documented precondition."""


class MissingGroundTruth(SqproxError, LookupError):
    """A certificate needs a minimizer that is not available."""


class ParseError(SqproxError, ValueError):
    """A config file or descriptor could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownDescriptor(ParseError):
    """A space or objective descriptor names nothing registered."""
