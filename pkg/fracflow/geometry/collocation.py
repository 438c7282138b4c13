"""Tagged spatiotemporal collocation sets."""

import csv
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.spatial import cKDTree

from fracflow.geometry.core import CoreGeometry, FractureSet
from fracflow.geometry.exceptions import EmptyLatticeError, GeometryError, InvariantViolationError
from fracflow.geometry.temporal import TemporalSampler, assign_times

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = (30, 60, 30)
DEFAULT_EXCLUSION = 0.0006
COLLOCATION_COLUMNS = ("x", "y", "z", "t", "tag")


class Tag(str, Enum):
    """Role of a collocation point in the loss."""

    MATRIX = "matrix"
    FRACTURE = "fracture"
    MATRIX_FRACTURE = "matrix_fracture"
    INLET = "inlet"
    OUTLET = "outlet"
    RADIAL = "radial"
    INITIAL = "initial"


@dataclass(frozen=True, eq=False)
class CollocationSet:
    """Immutable collection of (x, y, z, t) samples keyed by tag.

    Fracture and matrix-fracture rows are ordered like ``fractures.points``;
    only their times differ.
    """

    geometry: CoreGeometry
    fractures: FractureSet
    resolution: tuple[int, int, int]
    exclusion: float
    sampler: TemporalSampler
    points: Mapping[Tag, np.ndarray]

    def __getitem__(self, tag: Tag) -> np.ndarray:
        return self.points[tag]

    @property
    def n_matrix(self) -> int:
        return len(self.points[Tag.MATRIX])

    @property
    def n_fracture(self) -> int:
        return len(self.points[Tag.FRACTURE])

    def counts(self) -> dict[str, int]:
        return {tag.value: len(self.points[tag]) for tag in Tag}


def _with_times(xyz: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.empty((len(xyz), 4))
    out[:, :3] = xyz
    out[:, 3] = t
    return out


def _exclusion_keep(points: np.ndarray, fractures: FractureSet, exclusion: float) -> np.ndarray:
    if len(fractures) == 0 or len(points) == 0:
        return np.ones(len(points), dtype=bool)
    dist, _ = cKDTree(fractures.points).query(points, k=1)
    return dist > exclusion


def sample_matrix_points(
    geom: CoreGeometry,
    resolution: tuple[int, int, int],
    fractures: FractureSet,
    exclusion: float,
) -> np.ndarray:
    """Cell-centred lattice inside the core, minus points near any fracture.

    Raises:
        GeometryError: If a resolution component or the exclusion is invalid
        EmptyLatticeError: If nothing survives the filters
    """
    nx, ny, nz = resolution
    if nx < 2 or ny < 2 or (nz < 2 and not geom.is_slab):
        raise GeometryError(f"lattice resolution components must be >= 2, got {resolution}")
    if exclusion < 0.0:
        raise GeometryError(f"exclusion radius must be >= 0, got {exclusion}")

    xs, ys, zs = geom.lattice_axes(resolution)
    grid = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1).reshape(-1, 3)
    grid = grid[geom.inside(grid)]
    points = grid[_exclusion_keep(grid, fractures, exclusion)]
    if len(points) == 0:
        raise EmptyLatticeError(
            f"no matrix lattice points left at resolution {resolution} with exclusion {exclusion} m"
        )
    logger.debug(f"Matrix lattice: {len(grid)} inside core, {len(points)} after exclusion")
    return points


def sample_boundary_points(
    geom: CoreGeometry,
    n_face: int,
    n_radial: int,
    rng: np.random.Generator | None = None,
    resolution: tuple[int, int, int] = DEFAULT_RESOLUTION,
) -> dict[Tag, np.ndarray]:
    """Random inlet/outlet face samples and radial wall samples.

    Radial y values are drawn from the interior lattice rows.
    """
    if n_face < 1 or n_radial < 1:
        raise GeometryError(f"boundary counts must be >= 1, got {n_face}, {n_radial}")
    rng = rng if rng is not None else np.random.default_rng()
    r_c = geom.radius

    def face(y: float) -> np.ndarray:
        pts = np.zeros((n_face, 3))
        if geom.is_slab:
            pts[:, 0] = rng.uniform(-r_c, r_c, n_face)
        else:
            r = r_c * np.sqrt(rng.uniform(0.0, 1.0, n_face))
            theta = rng.uniform(0.0, 2.0 * np.pi, n_face)
            pts[:, 0] = r * np.cos(theta)
            pts[:, 2] = r * np.sin(theta)
        pts[:, 1] = y
        return pts

    _, ys, _ = geom.lattice_axes(resolution)
    radial = np.zeros((n_radial, 3))
    if geom.is_slab:
        radial[:, 0] = r_c * rng.choice([-1.0, 1.0], n_radial)
    else:
        beta = rng.uniform(0.0, 2.0 * np.pi, n_radial)
        radial[:, 0] = r_c * np.cos(beta)
        radial[:, 2] = r_c * np.sin(beta)
    radial[:, 1] = rng.choice(ys, n_radial)

    return {Tag.INLET: face(0.0), Tag.OUTLET: face(geom.length), Tag.RADIAL: radial}


def build_collocation(
    geom: CoreGeometry,
    fractures: FractureSet,
    sampler: TemporalSampler,
    resolution: tuple[int, int, int] = DEFAULT_RESOLUTION,
    exclusion: float = DEFAULT_EXCLUSION,
    n_face: int = 500,
    n_radial: int = 500,
    seed: int = 0,
) -> CollocationSet:
    """Assemble every tagged set with one time per spatial point."""
    rng = np.random.default_rng(seed)
    matrix = sample_matrix_points(geom, resolution, fractures, exclusion)
    boundary = sample_boundary_points(geom, n_face, n_radial, rng, resolution)
    frac = fractures.points

    points = {
        Tag.MATRIX: _with_times(matrix, assign_times(sampler, len(matrix), rng)),
        Tag.FRACTURE: _with_times(frac, assign_times(sampler, len(frac), rng)),
        Tag.MATRIX_FRACTURE: _with_times(frac, assign_times(sampler, len(frac), rng)),
        Tag.INITIAL: _with_times(matrix, np.zeros(len(matrix))),
    }
    for tag, xyz in boundary.items():
        points[tag] = _with_times(xyz, assign_times(sampler, len(xyz), rng))

    c = CollocationSet(
        geometry=geom,
        fractures=fractures,
        resolution=tuple(resolution),
        exclusion=exclusion,
        sampler=sampler,
        points=MappingProxyType({tag: points[tag] for tag in Tag}),
    )
    logger.info(f"Collocation set: {c.counts()}")
    return c


def _jittered_matrix(c: CollocationSet, k: int, rng: np.random.Generator) -> np.ndarray:
    geom = c.geometry
    xs, ys, zs = geom.lattice_axes(c.resolution)
    dx, dy, dz = geom.lattice_spacing(c.resolution)
    half = np.array([dx, dy, 0.0 if geom.is_slab else dz]) / 2.0
    out: list[np.ndarray] = []
    needed = k
    for _ in range(100):
        m = max(2 * needed, 16)
        centres = np.stack([rng.choice(xs, m), rng.choice(ys, m), rng.choice(zs, m)], axis=1)
        cand = centres + rng.uniform(-1.0, 1.0, (m, 3)) * half
        cand = cand[geom.inside(cand) & (cand[:, 1] > 0.0) & (cand[:, 1] < geom.length)]
        cand = cand[_exclusion_keep(cand, c.fractures, c.exclusion)]
        out.append(cand[:needed])
        needed -= len(out[-1])
        if needed <= 0:
            break
    if needed > 0:
        raise EmptyLatticeError("could not draw enough jittered matrix points")
    return np.concatenate(out)


def resample(
    c: CollocationSet,
    fraction: float,
    epoch: int,
    period: float,
    rng: np.random.Generator,
) -> CollocationSet:
    """Refresh part of the matrix lattice and every time coordinate.

    Only fires when ``epoch`` is a multiple of ``period``; an infinite or
    non-positive period disables resampling. Fracture spatial points and
    boundary spatial points stay fixed, as do the t=0 initial points.
    """
    if not 0.0 < fraction <= 1.0:
        raise GeometryError(f"resample fraction must be in (0, 1], got {fraction}")
    if period is None or period <= 0 or math.isinf(period) or epoch % int(period) != 0:
        return c

    matrix = c.points[Tag.MATRIX][:, :3].copy()
    k = int(round(fraction * len(matrix)))
    if k > 0:
        idx = rng.choice(len(matrix), size=k, replace=False)
        matrix[idx] = _jittered_matrix(c, k, rng)

    points = {Tag.MATRIX: _with_times(matrix, assign_times(c.sampler, len(matrix), rng))}
    for tag in (Tag.FRACTURE, Tag.MATRIX_FRACTURE, Tag.INLET, Tag.OUTLET, Tag.RADIAL):
        xyz = c.points[tag][:, :3]
        points[tag] = _with_times(xyz, assign_times(c.sampler, len(xyz), rng))
    points[Tag.INITIAL] = c.points[Tag.INITIAL]

    return replace(c, points=MappingProxyType({tag: points[tag] for tag in Tag}))


def check_invariants(c: CollocationSet) -> None:
    """Verify tag coverage, exclusion radius, boundary placement and times.

    Raises:
        InvariantViolationError: Naming the first broken invariant
    """
    missing = [tag.value for tag in Tag if tag not in c.points]
    if missing:
        raise InvariantViolationError(f"missing tags: {missing}")

    geom = c.geometry
    matrix = c.points[Tag.MATRIX]
    if len(c.fractures) and len(matrix):
        dist, _ = cKDTree(c.fractures.points).query(matrix[:, :3], k=1)
        if dist.min() <= c.exclusion:
            raise InvariantViolationError(
                f"matrix point within exclusion radius: min distance {dist.min():.3e} m"
            )
    radial = c.points[Tag.RADIAL]
    if geom.is_slab:
        r = np.abs(radial[:, 0])
    else:
        r = np.sqrt(radial[:, 0] ** 2 + radial[:, 2] ** 2)
    if np.any(np.abs(r - geom.radius) > 1e-12 * geom.radius):
        raise InvariantViolationError("radial point off the core wall")
    if np.any(c.points[Tag.INLET][:, 1] != 0.0):
        raise InvariantViolationError("inlet point off the y=0 face")
    if np.any(c.points[Tag.OUTLET][:, 1] != geom.length):
        raise InvariantViolationError("outlet point off the y=L face")
    if np.any(c.points[Tag.INITIAL][:, 3] != 0.0):
        raise InvariantViolationError("initial point with t != 0")
    for tag in Tag:
        if tag == Tag.INITIAL or len(c.points[tag]) == 0:
            continue
        t = c.points[tag][:, 3]
        if t.min() < c.sampler.t_min * (1.0 - 1e-12) or t.max() > c.sampler.t_max * (1.0 + 1e-12):
            raise InvariantViolationError(f"{tag.value} time outside the sampler range")


def write_collocation_csv(path: Path, c: CollocationSet) -> Path:
    """Dump every tagged point as ``x,y,z,t,tag``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLLOCATION_COLUMNS)
        for tag in Tag:
            for row in c.points[tag]:
                writer.writerow([repr(float(v)) for v in row] + [tag.value])
    return path
