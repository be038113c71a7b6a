"""Exception hierarchy shared by the library and the command-line scripts."""

from typing import Optional


class MonodromyError(Exception):
    """Base class for every error raised by polymonodromy."""

    exit_code = 1

    def __init__(self, message: str, detail: Optional[str] = None):
        super().__init__(message)
        self.detail = detail


class InputError(MonodromyError):
    """Input rejected before any computation (bad text, bad degree, bad index)."""

    exit_code = 2


class DegenerateInputError(InputError):
    """Input sits too close to a degenerate configuration to be decided."""


class NumericInconsistencyError(MonodromyError):
    """Numeric screening and exact certification disagree."""

    exit_code = 3


class TrackingError(NumericInconsistencyError):
    """Root solving or path continuation failed."""


class DegeneratePathError(TrackingError):
    """Step control underflowed; the loop should be perturbed."""
