"""Exception types shared across the package."""


class BitangentialError(Exception):
    """Base class for all package errors."""


class ShapeError(BitangentialError, ValueError):
    """Matrix dimensions are inconsistent."""


class SingularEquationError(BitangentialError):
    """A linear matrix equation has no unique solution."""


class NotHolomorphicError(BitangentialError):
    """A function expected to be holomorphic in the open region has poles there."""


class ExtractionError(BitangentialError):
    """Blaschke-Potapov factor extraction failed to terminate."""


class ParseError(BitangentialError, ValueError):
    """A problem file could not be parsed.

    The ``field`` attribute names the offending entry when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
