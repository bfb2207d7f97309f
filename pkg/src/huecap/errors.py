"""Exception types shared across the package."""


class HuecapError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HuecapError, ValueError):
    """An argument lies outside its documented domain."""


class EncodingMismatch(HuecapError, TypeError):
    """A color with the wrong encoding tag was passed to an operation."""


class InvalidArrangement(HuecapError, ValueError):
    """A cap arrangement is not a valid permutation of its row's caps."""


class ParseError(HuecapError, ValueError):
    """Input data could not be parsed against its documented schema."""


class ValidationError(HuecapError, ValueError):
    """Parsed data violates a documented constraint."""


class DegenerateData(HuecapError, ValueError):
    """A statistic is undefined for the given data (for example zero variance)."""
