"""Exception hierarchy shared by every module of the package."""


class DirvarError(Exception):
    """Base class for all errors raised by :mod:`dirvar`."""


class DimensionMismatch(DirvarError, ValueError):
    pass


class NotPositiveDefinite(DirvarError, ValueError):
    pass


class NotPsd(DirvarError, ValueError):
    pass


class MatrixOverflow(DirvarError, OverflowError):
    """Raised when repeated squaring leaves the representable range."""


class NoConvergence(DirvarError, RuntimeError):
    pass


class Infeasible(DirvarError):
    pass


class Unbounded(DirvarError):
    pass


class NotOptimal(DirvarError, ValueError):
    pass


class SeriesTooShort(DirvarError, ValueError):
    pass


class UnstableModel(DirvarError, ValueError):
    pass


class NotStationary(UnstableModel):
    pass


class ColumnInfeasible(DirvarError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"column {column} LP is infeasible")


class AllColumnsInfeasible(DirvarError):
    pass


class WindowTooLarge(DirvarError, ValueError):
    pass


class BadParams(DirvarError, ValueError):
    pass


class ZeroMatrix(DirvarError, ValueError):
    pass
