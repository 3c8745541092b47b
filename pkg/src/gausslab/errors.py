"""Shared exception types.

The CLI maps these onto exit codes: bad input -> 1, scale guard -> 2,
internal consistency failure -> 3.
"""


class GuardError(ValueError):
    """A parameter exceeds the supported scale of an operation."""


class InternalCheckError(AssertionError):
    """A proved identity or inequality failed numerically; this is a bug."""
