"""Exception hierarchy shared by every module."""


class WspcError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(WspcError, ValueError):
    """An operation was called outside its precondition."""


class ValidationError(WspcError, ValueError):
    """A schedule, encoding or instance violates its invariants."""


class ResourceLimit(WspcError, RuntimeError):
    """A configured budget (search nodes, horizon, prime count, retries) was exceeded.

    Never conflated with infeasibility: a caller that sees this exception knows
    nothing about the instance's verdict.
    """


class DocumentError(WspcError, ValueError):
    """A document failed to parse.

    Args:
        message: human readable description.
        path: location inside the document, e.g. ``jobs[2].period``.
        line: 1-based line number for syntax errors, when known.
        column: 1-based column for syntax errors, when known.
    """

    def __init__(self, message, path=None, line=None, column=None):
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(f"at {path}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)
