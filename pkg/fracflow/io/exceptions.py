"""Observation and voxel file exceptions."""

from fracflow.exceptions import ConfigurationError, FracFlowError


class VoxelFormatError(FracFlowError):
    """Base exception for voxel file parsing errors."""


class InvalidMagicError(VoxelFormatError):
    """File does not start with the voxel magic line."""


class PayloadSizeError(VoxelFormatError):
    """Payload length does not match the declared dimensions."""


class ObservationError(ConfigurationError):
    """Observation series or snapshots are inconsistent."""
