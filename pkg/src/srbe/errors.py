"""Exception hierarchy shared by every module of the package."""


class SrbeError(Exception):
    """Base class for all package errors."""


class ValidationError(SrbeError, ValueError):
    """Input failed a structural check (shape, range, missing field)."""


class DimensionMismatch(ValidationError):
    pass


class AsymmetricInput(ValidationError):
    pass


class InvalidShrinkage(ValidationError):
    pass


class EmptyGrid(ValidationError):
    pass


class UnknownPair(ValidationError):
    pass


class IncompleteModel(ValidationError):
    """Raised when true/plug-in coefficients are needed but were not supplied."""


class MissingColumn(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class NumericalError(SrbeError, ArithmeticError):
    """A numerical precondition failed (definiteness, rank)."""


class NotPositiveDefinite(NumericalError):
    pass


class RankDeficientDesign(NumericalError):
    pass
