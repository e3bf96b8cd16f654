"""Exception types shared across the package."""


class PermSyncError(Exception):
    """Base class for errors raised by this package."""


class GenerationError(PermSyncError):
    """A synthetic problem could not be generated (e.g. connectivity cap hit)."""


class FileFormatError(PermSyncError):
    """A problem or solution file is malformed."""


class SolverError(PermSyncError):
    """A solver's preconditions are violated or a numerical step failed."""
