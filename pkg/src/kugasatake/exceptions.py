"""Error hierarchy shared by every stage of the pipeline.

Each class carries the process exit code used by the command-line front end.
"""


class KugaSatakeError(Exception):
    exit_code = 1

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class ValidationError(KugaSatakeError, ValueError):
    """Malformed or mathematically invalid input."""

    exit_code = 1


class ScalarModeError(ValidationError, TypeError):
    """Arithmetic attempted between incompatible scalar modes."""


class DegenerateLatticeError(ValidationError):
    pass


class GuardExceeded(KugaSatakeError):
    """A size guard (dense rank, closure bound, binomial size) was hit."""

    exit_code = 2


class InvariantViolation(KugaSatakeError, AssertionError):
    """A computed object failed one of its defining invariants."""

    exit_code = 3
