"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes ("d mismatch", "m mismatch", ...)."""


class InvalidElement(ValueError):
    """Bytes do not encode an element of the prime-order group."""


class InvalidScalar(ValueError):
    """Bytes encode an integer outside [0, p)."""


class WireError(Exception):
    """Malformed or unexpected protocol data."""


class ShortRead(WireError):
    pass


class ProtocolMismatch(WireError):
    pass


class QueryBudgetExceeded(RuntimeError):
    pass
