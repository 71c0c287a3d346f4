"""Exception types raised by this package."""


class LssMatchError(Exception):
    """Base class for every error raised by lssmatch."""


class ParameterError(LssMatchError, ValueError):
    """An argument is outside its documented range (k, alpha, sizes, ...)."""


class DimensionMismatchError(LssMatchError, ValueError):
    """Two feature sets do not share the same vector dimension."""


class NonFiniteDataError(LssMatchError, ValueError):
    """An input coordinate or cost is NaN or infinite."""


class MatchingValidationError(LssMatchError, ValueError):
    """A pair list is not a valid injective partial matching."""


class DuplicateLeftIndexError(MatchingValidationError):
    """A left index appears in more than one pair."""


class DuplicateRightIndexError(MatchingValidationError):
    """A right index appears in more than one pair."""


class IndexRangeError(MatchingValidationError):
    """A pair refers to an index outside [0, n) x [0, m)."""


class CostOverflowError(LssMatchError, ValueError):
    """Quantized costs would overflow the solver's 64-bit budget."""


class SolverInvariantError(LssMatchError, RuntimeError):
    """The flow solver detected an internal inconsistency (a bug, not bad input)."""


class CsvParseError(LssMatchError, ValueError):
    """A delimited input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RaggedRowError(CsvParseError):
    """A row has a different number of columns than the first data row."""


class NonNumericCellError(CsvParseError):
    """A cell past the optional header row is not a number."""


class EmptyInputError(CsvParseError):
    """The file contains no data rows."""
