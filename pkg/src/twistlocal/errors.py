"""Shared exception types.

Every operation raises subclasses of TwistLocalError for anticipated failure
modes so the CLI and the service can map them to stable exit codes / HTTP
statuses without string matching.
"""


class TwistLocalError(Exception):
    """Base class for all package errors."""


class DomainError(TwistLocalError):
    """Input outside an operation's mathematical domain (not squarefree, zero
    modulus, composite where a prime is required, ...)."""


class SpecError(DomainError):
    """Invalid twist specification (bad m-tuple or d-tuple). Kept separate so
    front ends can treat a malformed spec as a usage error."""


class DispatchError(DomainError):
    """A verdict routine was called on a prime outside its precondition."""


class BoundExceededError(TwistLocalError):
    """An exact computation would exceed a documented size bound."""


class PrecisionError(TwistLocalError):
    """Floating point precision was exhausted before coefficients stabilised."""


class PreflightError(TwistLocalError):
    """Hypothesis preflight failed; carries the per-hypothesis report."""

    def __init__(self, message: str, report: list):
        super().__init__(message)
        self.report = report
