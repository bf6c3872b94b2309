"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line layer can map it to
the documented process status (3 for bad data, 4 for numerical failure).
"""


class SeriateError(Exception):
    exit_code = 1


class DataError(SeriateError, ValueError):
    exit_code = 3


class NumericalError(SeriateError, ArithmeticError):
    exit_code = 4


class DegenerateRange(DataError):
    """Raised when a matrix has no spread (max == min)."""


class NegativeEntry(DataError):
    pass


class SizeMismatch(DataError):
    pass


class DimensionMismatch(SizeMismatch):
    pass


class BadShape(DataError):
    pass


class NonFinite(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class BadClusterCount(DataError):
    pass


class BadRange(DataError):
    pass


class NotSymmetric(DataError):
    pass


class ZeroMatrix(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass


class NonFiniteLoss(NumericalError):
    pass


class ZeroSpectrum(UserWarning):
    """Warning: the eigenproblem had an all-zero matrix, any unit vector is valid."""


class DegenerateRow(UserWarning):
    """Warning: a zero-variance row was scaled through the epsilon guard."""
