"""Exception types shared across the package."""


class ModelSetsError(Exception):
    """Base class for all package-specific errors."""


class DatasetError(ModelSetsError):
    """Raised when prediction/ground-truth input cannot be loaded or is invalid."""


class ArtifactError(ModelSetsError):
    """Raised when an artifact file cannot be read, or its format is unsupported."""


class TagError(ModelSetsError):
    """Raised on invalid tag operations (empty name, unknown image id)."""
