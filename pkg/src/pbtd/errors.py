"""Exception types shared across the package."""


class DesignError(Exception):
    """Base class for all design-related errors."""


class ShapeError(DesignError):
    """Grid dimensions are wrong for the requested operation."""


class DomainMismatch(DesignError):
    """A permutation's degree does not match the object it is applied to."""


class SharedColumnMismatch(DesignError):
    """Two Howell grids offered for assembly do not share their last column."""


class AlmostDisjointViolation(DesignError):
    """Pair sets of two Howell grids overlap outside the shared column."""


class InvalidCenter(DesignError):
    """The middle column is not a perfect matching of the element set."""


class MissingGenerator(DesignError):
    """A template expansion lacks an assignment for some generator."""


class ParseError(DesignError):
    """Text input is malformed; carries a 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class RangeError(ParseError):
    """A parsed cell holds an out-of-range or degenerate pair."""
