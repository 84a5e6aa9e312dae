"""Exception types shared across the package."""


class CaminaError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(CaminaError):
    """A construction or enumeration exceeded a configured size bound."""


class ScaleError(CaminaError):
    """The request is correct but too large for desk-scale computation."""


class SpecMismatchError(CaminaError, ValueError):
    """Operands belong to different fields or ambient groups."""


class UnsupportedOperationError(CaminaError):
    """The operation needs data (enumeration, solvability, ...) that is absent."""


class InternalError(CaminaError, RuntimeError):
    """An internal consistency check failed; indicates a bug, never bad input."""
