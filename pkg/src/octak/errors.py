"""Exception types shared across the package."""


class OctakError(Exception):
    """Base class for all library errors."""


class PrecisionExhausted(OctakError):
    """An exact comparison needed more bits than the configured cap.

    Never means the answer is unknown mathematically; only that the interval
    refinement stopped before separating the two sides.
    """

    def __init__(self, bits: int):
        super().__init__(f"precision cap of {bits} bits reached before the comparison was decided")
        self.bits = bits


class DimensionMismatch(OctakError):
    pass


class NotUnitNorm(OctakError):
    pass


class NotAModuleVector(OctakError):
    """A column fails the L1 condition sum |x_i| <= 1."""


class NotIdempotent(OctakError):
    pass


class BudgetExceeded(OctakError):
    pass


class NormalFormFailure(OctakError):
    """No single-entry row after normalization: the reduction cannot peel."""


class UnsupportedDegree(OctakError):
    pass


class UnsupportedStem(OctakError):
    pass


class ParseError(OctakError):
    """Malformed field element, field name or matrix literal."""

    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.column = col
        self.text = text
