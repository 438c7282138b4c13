"""Separable convolutional kriging of voxel saturation data."""

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import convolve1d

from fracflow.denoise.exceptions import DenoiseError

logger = logging.getLogger(__name__)

KERNEL_TAPS = (1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    """Dense (nx, ny, nz) values on a regular lattice.

    ``mask`` marks valid voxels, typically the cylinder interior; None means
    every voxel is valid.
    """

    values: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    mask: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 3:
            raise DenoiseError(f"voxel grid must be 3D, got shape {values.shape}")
        object.__setattr__(self, "values", values)
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.shape != values.shape:
                raise DenoiseError(f"mask shape {mask.shape} does not match values {values.shape}")
            object.__setattr__(self, "mask", mask)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def valid(self) -> np.ndarray:
        """Boolean validity mask, all True when none was given."""
        return np.ones(self.shape, dtype=bool) if self.mask is None else self.mask

    def mean(self) -> float:
        """Mean over valid voxels."""
        return float(self.values[self.valid()].mean())


def kriging_kernel() -> np.ndarray:
    """Nine-tap smoothing kernel with a doubled centre, normalized to sum 1."""
    taps = np.asarray(KERNEL_TAPS)
    return taps / taps.sum()


def _convolve_runs(values: np.ndarray, valid: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """Mirror-padded convolution along ``axis`` applied to each run of valid voxels separately."""
    moved = np.moveaxis(values, axis, -1)
    lines = moved.reshape(-1, moved.shape[-1]).copy()
    line_valid = np.moveaxis(valid, axis, -1).reshape(lines.shape)

    full = line_valid.all(axis=1)
    if full.any():
        lines[full] = convolve1d(lines[full], kernel, axis=-1, mode="reflect")
    for row in np.flatnonzero(~full & line_valid.any(axis=1)):
        edges = np.flatnonzero(np.diff(np.concatenate(([0], line_valid[row].astype(np.int8), [0]))))
        for start, stop in zip(edges[::2], edges[1::2]):
            lines[row, start:stop] = convolve1d(lines[row, start:stop], kernel, mode="reflect")

    return np.moveaxis(lines.reshape(moved.shape), -1, axis)


def denoise3d(g: VoxelGrid) -> VoxelGrid:
    """Convolve along x, y and z in turn with the kriging kernel.

    Boundaries are mirrored. With a mask, every line is split into runs of
    valid voxels and each run is mirrored at its own ends, so invalid voxels
    never contribute and the sum over valid voxels is kept. Invalid voxels
    keep their input values. Axes shorter than the kernel are left alone.

    Raises:
        DenoiseError: If any valid voxel is not finite
    """
    valid = g.valid()
    if not np.all(np.isfinite(g.values[valid])):
        raise DenoiseError("voxel grid has non-finite values on valid voxels")

    kernel = kriging_kernel()
    out = np.where(valid, g.values, 0.0)
    for axis in range(3):
        if g.shape[axis] < len(kernel):
            logger.warning(f"Skipping axis {axis}: {g.shape[axis]} voxels is shorter than the kernel")
            continue
        if g.mask is None:
            out = convolve1d(out, kernel, axis=axis, mode="reflect")
            continue
        out = _convolve_runs(out, valid, kernel, axis)

    return replace(g, values=np.where(valid, out, g.values))


def add_gaussian_noise(
    g: VoxelGrid,
    sigma: float,
    rng: np.random.Generator | None = None,
    clip: tuple[float, float] | None = None,
) -> VoxelGrid:
    """Add zero-mean Gaussian noise of standard deviation ``sigma`` to valid voxels."""
    if sigma < 0.0:
        raise DenoiseError(f"noise sigma must be >= 0, got {sigma}")
    rng = rng if rng is not None else np.random.default_rng()
    noisy = g.values + rng.normal(0.0, sigma, g.shape) * g.valid()
    if clip is not None:
        noisy = np.clip(noisy, *clip)
    return replace(g, values=noisy)


def total_variation(values: np.ndarray) -> float:
    """Sum of absolute differences between neighbouring voxels along every axis."""
    return float(sum(np.abs(np.diff(values, axis=a)).sum() for a in range(values.ndim)))


def cylinder_mask(shape: tuple[int, int, int], axis: int = 1) -> np.ndarray:
    """Inscribed cylinder along ``axis`` on a cell-centred lattice."""
    others = [a for a in range(3) if a != axis]
    n0, n1 = shape[others[0]], shape[others[1]]
    u = (np.arange(n0) + 0.5) / n0 * 2.0 - 1.0
    v = (np.arange(n1) + 0.5) / n1 * 2.0 - 1.0
    disk = u[:, None] ** 2 + v[None, :] ** 2 < 1.0
    return np.broadcast_to(np.expand_dims(disk, axis), shape).copy()
