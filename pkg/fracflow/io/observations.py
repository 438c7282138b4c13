"""Observation bundles: RF and injection series plus saturation snapshots."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from fracflow.geometry import CoreGeometry
from fracflow.io.exceptions import ObservationError
from fracflow.io.series import read_rate_csv, read_rf_csv, write_rate_csv, write_rf_csv
from fracflow.io.voxel import VoxelFile, read_voxel, write_voxel

logger = logging.getLogger(__name__)

RF_FILE = "rf.csv"
RATE_FILE = "q_inj.csv"
SNAPSHOT_PATTERN = "sw_{index:03d}.vox"


def _empty() -> np.ndarray:
    return np.empty(0)


@dataclass(eq=False)
class ObservationBundle:
    """Everything a history match can be conditioned on; any part may be empty.

    ``insitu_points`` holds (x, y, z, t) rows for every finite voxel inside
    the core, aligned with ``insitu_values``.
    """

    rf_times: np.ndarray = field(default_factory=_empty)
    rf_values: np.ndarray = field(default_factory=_empty)
    q_times: np.ndarray = field(default_factory=_empty)
    q_values: np.ndarray = field(default_factory=_empty)
    snapshots: list[VoxelFile] = field(default_factory=list)
    insitu_points: np.ndarray = field(default_factory=lambda: np.empty((0, 4)))
    insitu_values: np.ndarray = field(default_factory=_empty)

    @property
    def is_empty(self) -> bool:
        return len(self.rf_times) == 0 and len(self.q_times) == 0 and len(self.insitu_values) == 0

    def describe(self) -> dict[str, int]:
        return {
            "rf_points": len(self.rf_times),
            "q_points": len(self.q_times),
            "snapshots": len(self.snapshots),
            "insitu_points": len(self.insitu_values),
        }


def snapshot_points(
    snapshot: VoxelFile,
    geometry: CoreGeometry,
    resolution: tuple[int, int, int] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(x, y, z, t) rows and values of the finite voxels inside the core.

    Raises:
        ObservationError: If the voxel dims or spacing disagree with the lattice
    """
    dims = snapshot.dims
    if resolution is not None and tuple(resolution) != dims:
        raise ObservationError(f"voxel dims {dims} do not match lattice resolution {tuple(resolution)}")
    expected = geometry.lattice_spacing(dims)
    if not np.allclose(snapshot.spacing, expected, rtol=1e-6, atol=0.0):
        raise ObservationError(f"voxel spacing {snapshot.spacing} does not match lattice spacing {expected}")

    xs, ys, zs = geometry.lattice_axes(dims)
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    xyz = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    values = snapshot.values.ravel()
    keep = geometry.inside(xyz) & np.isfinite(values)
    rows = np.column_stack([xyz[keep], np.full(int(keep.sum()), snapshot.time)])
    return rows, values[keep]


def load_observations(
    rf_path: Path | None = None,
    rate_path: Path | None = None,
    voxel_paths: Sequence[Path] = (),
    geometry: CoreGeometry | None = None,
    resolution: tuple[int, int, int] | None = None,
) -> ObservationBundle:
    """Read and validate whichever observation files are given.

    Raises:
        ObservationError: On non-monotone times, RF outside [0, 1], voxel
            dims or spacing that disagree with the lattice, or voxel files
            without a geometry
    """
    bundle = ObservationBundle()
    if rf_path is not None:
        bundle.rf_times, bundle.rf_values = read_rf_csv(rf_path)
    if rate_path is not None:
        bundle.q_times, bundle.q_values = read_rate_csv(rate_path)

    if voxel_paths:
        if geometry is None:
            raise ObservationError("voxel observations need the core geometry")
        snapshots = sorted((read_voxel(p) for p in voxel_paths), key=lambda v: v.time)
        times = [v.time for v in snapshots]
        if len(set(times)) != len(times):
            raise ObservationError(f"duplicate snapshot times: {times}")
        rows, values = [], []
        for snap in snapshots:
            r, v = snapshot_points(snap, geometry, resolution)
            rows.append(r)
            values.append(v)
        bundle.snapshots = snapshots
        bundle.insitu_points = np.concatenate(rows)
        bundle.insitu_values = np.concatenate(values)

    logger.info(f"Loaded observations: {bundle.describe()}")
    return bundle


def write_observations(directory: Path, bundle: ObservationBundle) -> dict[str, list[Path]]:
    """Write a bundle as ``rf.csv``, ``q_inj.csv`` and numbered voxel files."""
    directory.mkdir(parents=True, exist_ok=True)
    written: dict[str, list[Path]] = {"rf": [], "rate": [], "voxels": []}
    if len(bundle.rf_times):
        written["rf"].append(write_rf_csv(directory / RF_FILE, bundle.rf_times, bundle.rf_values))
    if len(bundle.q_times):
        written["rate"].append(write_rate_csv(directory / RATE_FILE, bundle.q_times, bundle.q_values))
    for i, snap in enumerate(bundle.snapshots):
        written["voxels"].append(write_voxel(directory / SNAPSHOT_PATTERN.format(index=i), snap))
    return written


def load_observation_dir(
    directory: Path,
    geometry: CoreGeometry | None = None,
    resolution: tuple[int, int, int] | None = None,
) -> ObservationBundle:
    """Load a directory laid out by ``write_observations``."""
    rf = directory / RF_FILE
    rate = directory / RATE_FILE
    return load_observations(
        rf_path=rf if rf.exists() else None,
        rate_path=rate if rate.exists() else None,
        voxel_paths=sorted(directory.glob("sw_*.vox")),
        geometry=geometry,
        resolution=resolution,
    )
