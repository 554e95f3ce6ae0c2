"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument lies outside the domain an operation supports."""


class NonUniqueSteadyState(RuntimeError):
    """The generator has more than one stationary state (e.g. no pumping)."""


class NumericalFailure(RuntimeError):
    """A solver failed to meet its residual or positivity tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UndefinedCorrelation(ArithmeticError):
    """A correlation function has a vanishing denominator."""


class ParseError(ValueError):
    """Malformed run configuration."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
