"""Voxel smoothing exceptions."""

from fracflow.exceptions import FracFlowError


class DenoiseError(FracFlowError):
    """Voxel grid is unusable for smoothing."""
