"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: parameter/contract problems are
validation failures, file problems are I/O failures, and singular
truncated covariances are numerical failures.
"""


class FdrkitError(Exception):
    """Base class for all errors raised by fdrkit."""


class GridMismatchError(FdrkitError, ValueError):
    """Two curves or operators do not live on the same grid."""


class ContractError(FdrkitError, ValueError):
    """A documented precondition was violated (e.g. uncentered data)."""


class ParameterError(FdrkitError, ValueError):
    """An argument is outside its accepted range or missing."""


class InsufficientDataError(FdrkitError, ValueError):
    """Fewer observations than the operation requires."""


class RankError(FdrkitError, ValueError):
    """Requested more components than the numerical rank supports."""


class SlicingError(FdrkitError, ValueError):
    """A response slice ended up with fewer than two observations."""


class SingularityError(FdrkitError, ArithmeticError):
    """The truncated covariance is numerically singular.

    Carries ``min_eigenvalue``, the smallest eigenvalue of the coordinate
    matrix that failed the ridge floor.
    """

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = float(min_eigenvalue)


class EstimationError(FdrkitError, RuntimeError):
    """A pipeline stage failed; carries the stage tag."""

    def __init__(self, stage, cause):
        super().__init__(f"estimation failed at stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause


class DatasetFormatError(FdrkitError, ValueError):
    """A dataset or result file could not be parsed.

    ``row`` and ``column`` locate the offending cell when known
    (1-based, header row included).
    """

    def __init__(self, message, row=None, column=None):
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
        self.row = row
        self.column = column
