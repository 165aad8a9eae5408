"""Exception hierarchy shared by every layer of the engine."""


class MmxError(Exception):
    """Base class for all engine errors."""


class RingMismatch(MmxError):
    pass


class AmbientMismatch(MmxError):
    pass


class InputError(MmxError):
    """Malformed or invalid user input (instance files, CLI arguments)."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)


class NotFiniteLength(MmxError):
    pass


class DegenerateInstance(MmxError):
    pass


class DimensionMismatch(MmxError):
    pass


class StabilizationFailure(MmxError):
    def __init__(self, message, residuals=None):
        self.residuals = residuals or []
        super().__init__(message)


class NonIntegerMultiplicity(MmxError):
    pass


class ResourceLimit(MmxError):
    """Raised when a combinatorial guard (e.g. generator count cap) trips."""


class SearchExhausted(MmxError):
    pass


class DimensionDropFailure(MmxError):
    pass


class ReductionCertificationFailure(MmxError):
    pass
