"""Exception types shared across the package."""


class SpikyballError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(SpikyballError, ValueError):
    pass


class ParseError(SpikyballError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyGraphError(ParseError):
    pass


class DegenerateDistributionError(SpikyballError, ArithmeticError):
    """Every candidate edge received zero probability mass."""


class ConvergenceError(SpikyballError, ArithmeticError):
    pass


class UndefinedMetricError(SpikyballError, ValueError):
    """A metric has no value for the given inputs (e.g. empty support)."""
