"""Exception hierarchy for funcmax."""


class FuncmaxError(Exception):
    """Base class for all funcmax errors."""


class IngestError(FuncmaxError):
    """Malformed or incomplete CSV panel."""


class GridMismatch(FuncmaxError):
    """The two groups were recorded on different time grids."""


class GridError(FuncmaxError):
    """Invalid time grid (non-increasing or outside [0, 1])."""


class BasisError(FuncmaxError):
    """Invalid projection basis."""


class DomainError(FuncmaxError):
    """Argument outside the mathematically valid domain."""


class MethodError(FuncmaxError):
    """Statistic kind mismatch between a statistic and a bootstrap distribution."""


class SpecError(FuncmaxError):
    """Invalid experiment specification."""


class IoError(FuncmaxError):
    """Failed to read or write an output file."""
