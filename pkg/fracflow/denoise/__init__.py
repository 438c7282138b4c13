"""fracflow denoise - separable convolutional kriging and synthetic CT noise."""

from fracflow.denoise.exceptions import DenoiseError
from fracflow.denoise.kriging import (
    KERNEL_TAPS,
    VoxelGrid,
    kriging_kernel,
    denoise3d,
    add_gaussian_noise,
    total_variation,
    cylinder_mask,
)

__all__ = [
    "DenoiseError",
    "KERNEL_TAPS",
    "VoxelGrid",
    "kriging_kernel",
    "denoise3d",
    "add_gaussian_noise",
    "total_variation",
    "cylinder_mask",
]
