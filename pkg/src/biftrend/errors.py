"""Exception hierarchy shared across the package.

Every error raised by biftrend derives from BiftrendError so callers can
catch package failures in one clause.  The split mirrors the exit codes of
the command line tool: configuration and domain problems (exit 2), numerical
failures (exit 3), and plain I/O (exit 1, raised as OSError by the stdlib).
"""

__all__ = [
    "BiftrendError",
    "DomainError",
    "ConfigError",
    "ExpressionError",
    "BandwidthError",
    "StencilError",
    "NumericalError",
]


class BiftrendError(Exception):
    """Base class for all package errors."""


class DomainError(BiftrendError, ValueError):
    """A parameter lies outside its mathematical domain."""


class ConfigError(BiftrendError, ValueError):
    """A configuration document is malformed or inconsistent.

    `pointer` is a JSON-pointer-style path into the offending field,
    e.g. "/model/H".
    """

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"at {pointer}: {message}" if pointer else message)


class ExpressionError(BiftrendError, ValueError):
    """A trend expression failed to tokenize, parse, or evaluate.

    `offset` is the byte offset into the source text where the problem
    was detected, or -1 for evaluation-time failures.
    """

    def __init__(self, message: str, offset: int = -1):
        self.offset = offset
        if offset >= 0:
            message = f"{message} (offset {offset})"
        super().__init__(message)


class BandwidthError(DomainError):
    """A kernel window does not fit the observation interval or grid."""


class StencilError(DomainError):
    """A finite-difference stencil does not fit inside the stated domain."""


class NumericalError(BiftrendError, ArithmeticError):
    """A numerical routine failed: factorization, quadrature, overflow."""
