"""Exception types shared across the toolkit.

``DataError`` covers everything wrong with user-supplied data or files
(schema violations, unknown names, inconsistent dimensions).  ``NumericError``
covers failures of the numeric machinery itself.  The CLI maps the former to
exit code 2 and the latter to exit code 3.
"""


class DataError(ValueError):
    """Invalid input data: bad schema, unknown name, mismatched shapes."""


class NumericError(RuntimeError):
    """Numeric failure, e.g. contradictory evidence collapsing a message to zero."""
