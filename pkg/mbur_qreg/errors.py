"""
Exception hierarchy for the MBUR quantile-regression toolkit.

Library code raises these; the reporting layer converts them into
``{"success": False, "error": ...}`` results and the CLI maps the three
families onto exit codes (data -> 3, numerical -> 4, usage -> 2).
"""

from typing import Optional, Sequence


class MburQregError(Exception):
    """Base class for every error raised by this package"""


class DomainError(MburQregError, ValueError):
    """An argument lies outside the domain of the operation"""


class UndefinedCorrelationError(DomainError):
    """Rank correlation requested for a constant sequence"""


class UsageError(MburQregError):
    """The request itself is malformed (empty ladder, unknown study, ...)"""


# --- Data errors -----------------------------------------------------------

class DataError(MburQregError):
    """Problems with the input table rather than with the numerics"""


class CsvFormatError(DataError):
    """Unparseable or ragged CSV content"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        if row is not None or column is not None:
            message = f"{message} (row {row}, column {column!r})"
        super().__init__(message)


class DuplicateLabelError(DataError):
    """Row labels must be unique"""


class ColumnNotFoundError(DataError, KeyError):
    """A requested column is not in the table"""

    def __init__(self, name: str, available: Sequence[str] = ()):
        self.name = name
        self.available = list(available)
        super().__init__(f"Unknown column {name!r}; available: {', '.join(self.available)}")

    def __str__(self) -> str:
        # KeyError would otherwise repr() the message
        return self.args[0]


class InsufficientDataError(DataError):
    """Too few complete rows survive listwise deletion"""


class ResponseDomainError(DataError, ValueError):
    """Response values outside the open unit interval"""

    def __init__(self, message: str, labels: Sequence[str] = ()):
        self.labels = list(labels)
        if self.labels:
            message = f"{message}: {', '.join(self.labels)}"
        super().__init__(message)


class FixtureChecksumError(DataError):
    """The embedded OECD fixture no longer matches its recorded digest"""


# --- Numerical errors ------------------------------------------------------

class NumericalError(MburQregError):
    """A numerical procedure could not produce a result"""


class SingularMatrixError(NumericalError):
    """Matrix singular within pivot tolerance"""

    def __init__(self, message: str, column: Optional[int] = None):
        self.column = column
        if column is not None:
            message = f"{message} (pivot column {column})"
        super().__init__(message)


class EvaluationError(NumericalError):
    """Objective returned a non-finite value at an evaluation point"""

    def __init__(self, message: str, point: Sequence[float] = ()):
        self.point = [float(v) for v in point]
        super().__init__(f"{message} at {self.point}")


class StartPointError(NumericalError):
    """Objective is not finite at the optimizer's start"""

    def __init__(self, message: str, rows: Sequence[str] = ()):
        self.rows = list(rows)
        if self.rows:
            message = f"{message}; rows outside the domain: {', '.join(map(str, self.rows))}"
        super().__init__(message)


class LinkOverflowError(NumericalError, OverflowError):
    """exp(phi) overflows while mapping a linear predictor"""
