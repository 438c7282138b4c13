"""denoise and add-noise command implementations."""

from dataclasses import replace
from pathlib import Path

import numpy as np

from fracflow.cli.output import console, print_success
from fracflow.cli.runner import file_sha256, guarded, write_manifest
from fracflow.denoise import VoxelGrid, add_gaussian_noise, cylinder_mask, denoise3d, total_variation
from fracflow.io import VoxelFile, read_voxel, write_voxel
from fracflow.logging import setup_logging


def _load_grid(path: Path, cylinder_axis: int | None) -> tuple[VoxelFile, VoxelGrid]:
    vox = read_voxel(path)
    # Voxels outside the core are stored as NaN
    mask = np.isfinite(vox.values)
    if cylinder_axis is not None:
        mask &= cylinder_mask(vox.dims, cylinder_axis)
    return vox, VoxelGrid(values=vox.values, spacing=vox.spacing, mask=mask)


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def run_denoise(input_path: Path, output_path: Path, cylinder_axis: int | None = None, debug: bool = False):
    """Apply the kriging filter to one voxel file."""
    with guarded("denoise"):
        setup_logging(debug=debug)
        vox, grid = _load_grid(input_path, cylinder_axis)
        smoothed = denoise3d(grid)
        valid = grid.valid()
        write_voxel(output_path, replace(vox, values=smoothed.values))
        write_manifest(
            _sidecar(output_path),
            "denoise",
            inputs={"input": str(input_path), "input_sha256": file_sha256(input_path), "cylinder_axis": cylinder_axis},
        )
        before = total_variation(np.where(valid, grid.values, 0.0))
        after = total_variation(np.where(valid, smoothed.values, 0.0))
        console.print(f"Total variation: {before:.6g} -> {after:.6g}")
        print_success(f"Wrote {output_path}")


def run_add_noise(
    input_path: Path,
    output_path: Path,
    sigma: float,
    seed: int = 0,
    clip: tuple[float, float] | None = (0.0, 1.0),
    debug: bool = False,
):
    """Add Gaussian noise to one voxel file, as a stand-in for CT measurement noise."""
    with guarded("add-noise"):
        setup_logging(debug=debug)
        vox, grid = _load_grid(input_path, None)
        noisy = add_gaussian_noise(grid, sigma, np.random.default_rng(seed), clip)
        values = np.where(grid.valid(), noisy.values, vox.values)
        write_voxel(output_path, replace(vox, values=values))
        write_manifest(
            _sidecar(output_path),
            "add-noise",
            seed=seed,
            inputs={
                "input": str(input_path),
                "input_sha256": file_sha256(input_path),
                "sigma": sigma,
                "clip": list(clip) if clip is not None else None,
            },
        )
        print_success(f"Wrote {output_path} (sigma={sigma:g})")
