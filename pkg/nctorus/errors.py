"""Exceptions raised by nctorus."""


class NcTorusError(Exception):
    """Base class for all nctorus errors."""


class CompatibilityError(NcTorusError):
    """Operands live in different algebras (theta or matrix size differ)."""


class ArgumentError(NcTorusError, ValueError):
    """Argument outside of its domain (axis, time, grid...)."""


class ConfigError(NcTorusError):
    """Invalid configuration value or configuration file."""


class PreconditionError(NcTorusError):
    """
    Operation precondition does not hold. `defect` carries the measured value
    that exceeded the tolerance, when there is one.
    """

    def __init__(self, message: str, defect: float = None) -> None:
        super().__init__(message)
        self.defect = defect


class ElementFormatError(NcTorusError):
    """Element file violates the nctorus text format."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
