"""Exception types shared across the toolkit."""


class V2xFieldError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(V2xFieldError):
    """A domain invariant was violated (bad coordinate, duplicate id, ...)."""


class ParseError(V2xFieldError):
    """An input file is malformed; the message carries line/packet context."""


class BudgetExceededError(V2xFieldError):
    """A calibration grid is larger than the configured evaluation budget."""
