"""Exception types shared across the package."""


class AuditError(Exception):
    """Base class for errors raised by this package."""


class GridOverflowError(AuditError):
    """A privacy-loss value does not fit on the configured grid.

    Raised with a message that states the offending value and the half-width
    needed to accommodate it.
    """


class FitError(AuditError):
    """A parameter fit could not be carried out (e.g. non-monotone profile)."""


class ScoreFileError(AuditError):
    """A score file is malformed; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number
