"""Exception types shared across the solver modules.

Plain ``ValueError`` is used for garden-variety invalid arguments; the
classes below name failure modes that callers may want to catch and
handle individually (retry with a different seed, loosen a time step,
report a partial result).
"""

__all__ = [
    "DomainTooSmallError",
    "IncompatibleFieldsError",
    "ZeroNormError",
    "NumericalBlowupError",
    "EmptyOverlapError",
    "InvalidTraceError",
    "UnsupportedModeError",
    "DegenerateStartError",
    "ConfigParseError",
]


class DomainTooSmallError(ValueError):
    """Grid construction would yield fewer than the minimum nodes per axis."""


class IncompatibleFieldsError(ValueError):
    """Two fields (or a field and an operator) live on different grids or modes."""


class ZeroNormError(ValueError):
    """A field with zero norm was passed where a normalizable one is required."""


class NumericalBlowupError(ArithmeticError):
    """Propagation produced non-finite values; the time step is unstable."""


class EmptyOverlapError(RuntimeError):
    """The start state lies (numerically) inside the deflated subspace."""


class InvalidTraceError(ValueError):
    """An energy trace does not support the requested diagnostic."""


class UnsupportedModeError(ValueError):
    """A mode number outside the implemented range was requested."""


class DegenerateStartError(RuntimeError):
    """A block of start vectors is numerically rank deficient."""


class ConfigParseError(ValueError):
    """A job config file failed to parse; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
