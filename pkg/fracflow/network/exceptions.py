"""Network construction and evaluation exceptions."""

from fracflow.exceptions import FracFlowError


class NetworkError(FracFlowError):
    """Base exception for network errors."""


class NonFiniteActivationError(NetworkError):
    """A hidden layer produced NaN or infinite activations."""


class CheckpointError(NetworkError):
    """Checkpoint file is missing, corrupt or of an unknown version."""
