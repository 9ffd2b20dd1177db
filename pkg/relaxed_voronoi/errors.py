"""
Exceptions raised by the library.

Every error carries the CLI exit code it maps to, so the command-line layer
can translate failures without inspecting messages.
"""


class RelaxedVoronoiError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


class InputError(RelaxedVoronoiError, ValueError):
    """Malformed or unsupported input (exit code 2)."""

    exit_code = 2


class InvariantViolation(RelaxedVoronoiError, AssertionError):
    """
    An output failed a property the algorithms guarantee (exit code 3).

    Attributes:
        invariant: Short name of the violated property.
    """

    exit_code = 3

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant
        self.detail = detail
