class BridgeError(Exception):
    """Base class for training-bridge failures."""


class ArtifactError(BridgeError):
    """Input artifacts are missing, malformed, or fail manifest verification."""
