"""Exception hierarchy shared by all modules.

Errors fall in two families: ``UsageError`` subclasses signal invalid input
(bad shapes, malformed documents, cyclic graphs) and ``NumericalError``
subclasses signal that a well-posed computation failed (divergence, loss of
locking, ill-conditioning).  The command-line front end maps the two families
to different exit codes.
"""

from __future__ import annotations


class InjlockError(Exception):
    """Base class for every error raised by the package."""


class UsageError(InjlockError, ValueError):
    """Invalid input supplied by the caller."""


class NumericalError(InjlockError, ArithmeticError):
    """A numerical computation failed."""


class UndefinedInputError(UsageError):
    """The sign operator was asked to normalize a zero field."""


class ShapeError(UsageError):
    """Array or port arities do not match."""


class TopologyError(UsageError):
    """A network or circuit graph is cyclic or references unknown nodes."""


class SchemaError(UsageError):
    """A JSON document violates its schema.

    Parameters
    ----------
    message : str
        Human readable description.
    path : str
        JSON path of the offending field, e.g. ``$.nodes[2].params.mu``.
    """

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnassignedInputError(UsageError, KeyError):
    """A circuit input was left without a value."""

    def __str__(self) -> str:  # KeyError quotes its argument; keep it readable
        return str(self.args[0]) if self.args else ""


class UnderResolvedError(UsageError):
    """A discretization parameter is too coarse to be meaningful."""


class NoLockingError(NumericalError):
    """A slave laser received zero injection and has no locked state."""


class DivergenceError(NumericalError):
    """The rate-equation integration produced a non-finite state.

    Attributes
    ----------
    time : float
        Simulated time (seconds) at which the failure was detected.
    """

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class ConditioningError(NumericalError):
    """A linear system is too ill-conditioned to solve reliably."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition
