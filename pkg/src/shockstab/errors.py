"""Exception types shared across the library.

Every error raised on a user-facing path derives from ShockStabError so
callers can catch one base class; the concrete subclasses let tests and
the CLI distinguish configuration mistakes from data problems.
"""


class ShockStabError(Exception):
    """Base class for all shockstab errors."""


class ConfigError(ShockStabError):
    """Invalid configuration: bad option values, empty grids, non-finite coefficients."""


class DataError(ShockStabError):
    """Base class for errors caused by the input data rather than by options."""


class CsvFormatError(DataError):
    """Unreadable, ragged or header-less CSV input."""


class RaggedRowError(CsvFormatError):
    def __init__(self, row_index, expected, got):
        self.row_index = row_index
        super().__init__(
            f"row {row_index} has {got} cells, header has {expected}"
        )


class EmptyHeaderError(CsvFormatError):
    pass


class UndeterminableColumnError(DataError):
    """A column contains only missing cells, so its kind cannot be inferred."""

    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column!r} is entirely missing")


class EmptyColumnError(DataError):
    """A column sample is empty after dropping missing cells."""

    def __init__(self, column=None):
        self.column = column
        msg = "empty sample after dropping missing cells"
        if column is not None:
            msg += f" in column {column!r}"
        super().__init__(msg)


class SchemaMismatchError(DataError):
    """Two frames disagree on a column's presence or kind."""

    def __init__(self, column, detail=""):
        self.column = column
        msg = f"schema mismatch on column {column!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DomainError(ShockStabError):
    """A numeric argument lies outside its documented domain."""


class DuplicateKeyError(DataError):
    """A (model, outlier level) pair appears more than once."""

    def __init__(self, key):
        self.key = key
        super().__init__(f"duplicate (model, level) key: {key!r}")


class DegenerateSplitError(DataError):
    """A shock split would leave the pre- or post-shock side empty."""


class DateParseError(DataError):
    """A date cell does not parse as a timestamp."""

    def __init__(self, row_index, value):
        self.row_index = row_index
        self.value = value
        super().__init__(f"row {row_index}: cannot parse {value!r} as a date")


class EmptyInputError(DataError):
    """An operation received an empty list where at least one element is required."""


class InsufficientDataError(DataError):
    """Too few usable rows to fit the synthetic-data generator."""


class DegenerateMarginalsError(DataError):
    """All numerical columns have zero spread, so no tail can be placed."""


class InsufficientSyntheticError(DataError):
    """The synthetic pool is too small for the requested real/synthetic mix."""

    def __init__(self, needed, available):
        self.needed = needed
        self.available = available
        super().__init__(
            f"mix needs {needed} synthetic rows but only {available} are available"
        )


class DegenerateLabelsError(DataError):
    """Labels are not binary {0,1} with both classes present."""
