"""Exception types shared across the toolkit."""


class LineMFError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(LineMFError, ValueError):
    """Input data violates a documented invariant."""


class GraphFormatError(ValidationError):
    """An edge-list line could not be parsed."""

    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class UsageError(LineMFError, ValueError):
    """An operation was called on the wrong kind of input (e.g. directedness)."""
