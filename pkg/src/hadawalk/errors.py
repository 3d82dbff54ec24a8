"""Exception types shared across the package."""


class HadawalkError(Exception):
    """Base class for all package errors."""


class CapExceeded(HadawalkError):
    """A size cap (n, t, node count, ...) was exceeded."""


class MemoryBudgetExceeded(CapExceeded):
    """The live DP state count grew beyond the configured budget."""


class BudgetExceeded(CapExceeded):
    """A simulation step budget was exceeded."""


class NodeCapExceeded(CapExceeded):
    pass


class DimensionMismatch(HadawalkError, ValueError):
    pass


class InvalidParameter(HadawalkError, ValueError):
    """Generic precondition failure on a numeric argument."""


class OutOfRegion(InvalidParameter):
    pass


class InvalidDelta(InvalidParameter):
    pass


class BadDelta(InvalidDelta):
    """n * delta falls outside (0, 1)."""


class InvalidRadius(InvalidParameter):
    pass


class BadRowIndex(InvalidParameter):
    pass


class BadStepCount(InvalidParameter):
    pass


class BadAlphaBeta(InvalidParameter):
    pass


class UnsupportedN(InvalidParameter):
    pass


class UnsupportedT(InvalidParameter):
    pass


class NotEvenDegree(HadawalkError, ValueError):
    pass


class NoExactCount(HadawalkError):
    pass


class DegenerateCase(HadawalkError, ValueError):
    pass


class AlphaNotPositive(HadawalkError, ValueError):
    pass


class BadInput(HadawalkError, ValueError):
    pass
