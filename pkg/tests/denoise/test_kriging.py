"""Tests for separable kriging smoothing and synthetic noise."""

import numpy as np
import pytest

from fracflow.denoise import (
    DenoiseError,
    VoxelGrid,
    add_gaussian_noise,
    cylinder_mask,
    denoise3d,
    kriging_kernel,
    total_variation,
)


def _direct(values: np.ndarray) -> np.ndarray:
    """Mirror-padded separable convolution written out by hand."""
    k = kriging_kernel()
    half = len(k) // 2
    out = values.copy()
    for axis in range(3):
        padded = np.pad(out, [(half, half) if a == axis else (0, 0) for a in range(3)], mode="symmetric")
        acc = np.zeros_like(out)
        for j, w in enumerate(k):
            index = [slice(None)] * 3
            index[axis] = slice(j, j + out.shape[axis])
            acc += w * padded[tuple(index)]
        out = acc
    return out


def test_kernel_normalized():
    """Nine taps, doubled centre, unit sum."""
    k = kriging_kernel()
    assert len(k) == 9
    assert k.sum() == pytest.approx(1.0)
    assert k[4] == pytest.approx(2 * k[0])
    assert np.array_equal(k, k[::-1])


def test_constant_field_unchanged():
    """Smoothing a constant returns the constant, with or without a mask."""
    g = VoxelGrid(np.full((10, 12, 9), 0.37))
    assert np.allclose(denoise3d(g).values, 0.37)
    masked = VoxelGrid(np.full((10, 12, 10), 0.37), mask=cylinder_mask((10, 12, 10)))
    assert np.allclose(denoise3d(masked).values, 0.37)


def test_mean_preserved():
    """Mirror padding keeps the mean of an unmasked grid."""
    values = np.random.default_rng(0).uniform(0.0, 1.0, (11, 13, 10))
    out = denoise3d(VoxelGrid(values))
    assert out.values.mean() == pytest.approx(values.mean(), abs=1e-12)


def test_mean_preserved_inside_cylinder():
    """Mirroring at the cylinder edge keeps the mean over valid voxels."""
    values = np.random.default_rng(7).uniform(0.0, 1.0, (16, 12, 16))
    mask = cylinder_mask(values.shape, axis=1)
    out = denoise3d(VoxelGrid(values, mask=mask))
    assert out.values[mask].mean() == pytest.approx(values[mask].mean(), abs=1e-12)
    assert np.array_equal(out.values[~mask], values[~mask])


def test_mean_preserved_with_split_runs():
    """A masked plane splits lines into separate runs, each mirrored on its own."""
    values = np.random.default_rng(8).uniform(0.0, 1.0, (16, 10, 12))
    mask = np.ones(values.shape, dtype=bool)
    mask[3, :, :] = False
    mask[:, :, 5] = False
    out = denoise3d(VoxelGrid(values, mask=mask))
    assert out.values[mask].mean() == pytest.approx(values[mask].mean(), abs=1e-12)
    assert out.values[mask].min() >= values[mask].min() - 1e-12
    assert out.values[mask].max() <= values[mask].max() + 1e-12


def test_matches_direct_convolution():
    """Output equals an explicit mirror-padded convolution."""
    values = np.random.default_rng(1).normal(size=(9, 14, 11))
    assert np.allclose(denoise3d(VoxelGrid(values)).values, _direct(values), atol=1e-12)


def test_smoothing_reduces_variation():
    """Noise is damped: total variation drops."""
    rng = np.random.default_rng(2)
    noisy = add_gaussian_noise(VoxelGrid(np.full((12, 12, 12), 0.5)), 0.1, rng)
    assert total_variation(denoise3d(noisy).values) < 0.5 * total_variation(noisy.values)


def test_mask_keeps_invalid_voxels():
    """Invalid voxels keep their input, valid ones average only valid neighbours."""
    shape = (12, 10, 12)
    mask = cylinder_mask(shape, axis=1)
    values = np.where(mask, 0.4, np.nan)
    out = denoise3d(VoxelGrid(values, mask=mask)).values
    assert np.all(np.isnan(out[~mask]))
    assert np.allclose(out[mask], 0.4)


def test_short_axis_skipped():
    """Axes shorter than the kernel are not smoothed."""
    z = np.array([0.0, 1.0, 0.0])
    values = np.broadcast_to(z, (10, 10, 3)).copy()
    assert np.allclose(denoise3d(VoxelGrid(values)).values, values)


def test_non_finite_valid_voxel_rejected():
    """NaNs are only allowed outside the mask."""
    values = np.zeros((9, 9, 9))
    values[4, 4, 4] = np.nan
    with pytest.raises(DenoiseError):
        denoise3d(VoxelGrid(values))


def test_voxel_grid_validation():
    """Values must be 3D and the mask must match."""
    with pytest.raises(DenoiseError):
        VoxelGrid(np.zeros((4, 4)))
    with pytest.raises(DenoiseError):
        VoxelGrid(np.zeros((4, 4, 4)), mask=np.ones((4, 4, 3), dtype=bool))
    g = VoxelGrid(np.arange(8.0).reshape(2, 2, 2), mask=np.eye(2, dtype=bool)[:, :, None].repeat(2, axis=2))
    assert g.mean() == pytest.approx(np.arange(8.0).reshape(2, 2, 2)[g.valid()].mean())


def test_add_noise():
    """Noise is seeded, spares invalid voxels and respects the clip range."""
    mask = cylinder_mask((10, 6, 10))
    g = VoxelGrid(np.full((10, 6, 10), 0.5), mask=mask)
    a = add_gaussian_noise(g, 0.05, np.random.default_rng(4))
    b = add_gaussian_noise(g, 0.05, np.random.default_rng(4))
    assert np.array_equal(a.values, b.values)
    assert np.all(a.values[~mask] == 0.5)
    assert a.values[mask].std() > 0.0

    clipped = add_gaussian_noise(g, 5.0, np.random.default_rng(4), clip=(0.0, 1.0))
    assert clipped.values.min() >= 0.0
    assert clipped.values.max() <= 1.0
    assert np.array_equal(add_gaussian_noise(g, 0.0).values, g.values)
    with pytest.raises(DenoiseError):
        add_gaussian_noise(g, -1.0)


def test_cylinder_mask():
    """The disk is inscribed across the two axes other than the cylinder axis."""
    m = cylinder_mask((8, 5, 8), axis=1)
    assert m.shape == (8, 5, 8)
    assert not m[0, 0, 0]
    assert m[4, 2, 4]
    assert np.array_equal(m[:, 0, :], m[:, 4, :])


def test_total_variation():
    """Hand value on a small ramp."""
    values = np.arange(4.0).reshape(4, 1, 1)
    assert total_variation(values) == 3.0
