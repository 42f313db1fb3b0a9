"""Exception types shared across the package."""


class DustcastError(Exception):
    """Base class for all package-specific errors."""


class IngestionError(DustcastError):
    """Problem acquiring or merging source data."""


class SourceUnreachableError(IngestionError):
    """The configured data source could not be read."""


class EmptyRangeError(IngestionError):
    """Requested date range is empty (start after end)."""


class MalformedRecordError(IngestionError):
    """A source row is structurally invalid.

    ``field`` names the offending column.
    """

    def __init__(self, field: str, detail: str = ""):
        self.field = field
        message = f"malformed record: field '{field}'"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class InterpolationError(IngestionError):
    """Gap filling impossible, e.g. no valid AOD value in the whole series."""


class EmptyDatasetError(DustcastError):
    """Feature assembly or filtering left no usable rows."""


class ConfigError(DustcastError):
    """Configuration file missing, unreadable, or incomplete."""


class NotFittedError(DustcastError):
    """Prediction requested from a model that has not been fitted."""


class FittingError(DustcastError):
    """Training failed (non-finite loss, divergence)."""


class BundleError(DustcastError):
    """Model bundle cannot be saved or loaded."""


class SchemaMismatchError(BundleError):
    """Persisted bundle does not match what this code expects."""


class CorruptBundleError(BundleError):
    """A bundle blob failed its integrity check."""
