"""Exception hierarchy shared by every nilsolve module."""


class NilsolveError(Exception):
    """Base class for all library errors."""


class InvalidDimension(NilsolveError, ValueError):
    pass


class InvalidTable(NilsolveError, ValueError):
    """Structure constants that are not triangular, symmetric or associative."""


class AlgebraMismatch(NilsolveError, ValueError):
    pass


class NonInvertible(NilsolveError, ZeroDivisionError):
    pass


class DegenerateMath(NilsolveError):
    """Common parent of the failures caused by degenerate free data."""

    exit_code = 3


class DegenerateCharacteristic(DegenerateMath):
    exit_code = 3


class DegenerateLift(DegenerateMath):
    exit_code = 5


class NoRoot(DegenerateMath):
    exit_code = 6


class DegenerateSeed(DegenerateMath):
    exit_code = 7


class InsufficientMembers(NilsolveError, ValueError):
    pass


class InsufficientDepth(NilsolveError, ValueError):
    pass


class UnknownFunction(NilsolveError, KeyError):
    pass


class PoleOnDomain(NilsolveError, ZeroDivisionError):
    pass
