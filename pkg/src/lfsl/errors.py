"""Exception hierarchy shared by all modules."""


class LfslError(Exception):
    """Base class for every error raised by the package."""


class InvalidDimension(LfslError, ValueError):
    pass


class InvalidSpin(LfslError, ValueError):
    pass


class DimensionMismatch(LfslError, ValueError):
    pass


class InvalidModel(LfslError, ValueError):
    pass


class InvalidTime(LfslError, ValueError):
    pass


class InvalidGenerator(LfslError, ValueError):
    pass


class InvalidParameter(LfslError, ValueError):
    pass


class InvalidSize(InvalidParameter):
    pass


class InvalidTruncation(InvalidParameter):
    pass


class NumericalFailure(LfslError, ArithmeticError):
    """Raised when a linear-algebra routine fails or a post-condition is violated.

    ``diagnostics`` carries whatever residuals were measured at the point of failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
