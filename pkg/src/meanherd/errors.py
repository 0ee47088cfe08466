"""Exception hierarchy shared by all meanherd modules."""


class MeanHerdError(Exception):
    """Base class for all meanherd errors."""


class InputError(MeanHerdError, ValueError):
    """Invalid argument values (bad labels, out-of-range rates, shape mismatch)."""


class ParseError(MeanHerdError):
    """Malformed data file; carries the offending path and line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
        if line is not None:
            prefix += f"{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class DataError(MeanHerdError):
    """Non-finite or otherwise unusable numeric data."""


class ConsistencyError(MeanHerdError):
    """Internal invariant violated (e.g. a squared norm far below zero)."""
