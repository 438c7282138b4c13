"""Core sample geometry and fracture point clouds."""

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from fracflow.geometry.exceptions import FractureFileError, GeometryError, InletAreaError

logger = logging.getLogger(__name__)

FRACTURE_COLUMNS = ("x_m", "y_m", "z_m", "fracture_id")


class Shape(str, Enum):
    """Cross-section of the core: a full cylinder or its 2D (x, y) slab reduction."""

    CYLINDER = "cylinder"
    SLAB = "slab"


@dataclass(frozen=True)
class CoreGeometry:
    """Core plug with flow along +y from the inlet face y=0 to the outlet y=L.

    A cylinder is centred on the y axis. A slab spans x in [-r_c, r_c] at z=0
    and gives face areas through ``depth``.
    """

    length: float
    radius: float
    shape: Shape = Shape.CYLINDER
    depth: float = 1.0

    def __post_init__(self):
        if not self.length > 0.0 or not self.radius > 0.0:
            raise GeometryError(
                f"core length and radius must be > 0, got L={self.length}, r_c={self.radius}"
            )
        if not self.depth > 0.0:
            raise GeometryError(f"slab depth must be > 0, got {self.depth}")

    @property
    def is_slab(self) -> bool:
        return self.shape == Shape.SLAB

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        """Coordinate axes the fields vary along."""
        return (0, 1) if self.is_slab else (0, 1, 2)

    @property
    def lateral_axes(self) -> tuple[int, ...]:
        """Axes normal to the sealed side walls."""
        return (0,) if self.is_slab else (0, 2)

    @property
    def cross_section(self) -> float:
        """Inlet face area in m²."""
        if self.is_slab:
            return 2.0 * self.radius * self.depth
        return math.pi * self.radius ** 2

    def inside(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points strictly inside the lateral boundary."""
        points = np.atleast_2d(points)
        if self.is_slab:
            return np.abs(points[:, 0]) < self.radius
        return points[:, 0] ** 2 + points[:, 2] ** 2 < self.radius ** 2

    def lattice_axes(self, resolution: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cell-centred coordinates of the Cartesian lattice along x, y, z."""
        nx, ny, nz = resolution
        dx, dy, _ = self.lattice_spacing(resolution)
        xs = -self.radius + (np.arange(nx) + 0.5) * dx
        ys = (np.arange(ny) + 0.5) * dy
        if self.is_slab:
            zs = np.zeros(1)
        else:
            dz = 2.0 * self.radius / nz
            zs = -self.radius + (np.arange(nz) + 0.5) * dz
        return xs, ys, zs

    def lattice_spacing(self, resolution: tuple[int, int, int]) -> tuple[float, float, float]:
        """Lattice spacing (dx, dy, dz); dz is the slab depth for slabs."""
        nx, ny, nz = resolution
        dz = self.depth if self.is_slab else 2.0 * self.radius / nz
        return 2.0 * self.radius / nx, self.length / ny, dz


@dataclass(frozen=True)
class PlanarFracture:
    """Rectangular planar fracture centred at ``origin``.

    ``extent`` holds the side lengths along the in-plane flow direction and
    along the second in-plane direction.
    """

    origin: tuple[float, float, float]
    normal: tuple[float, float, float]
    extent: tuple[float, float]

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unit normal and the two in-plane directions (u follows +y when possible)."""
        n = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise GeometryError("fracture normal must be non-zero")
        n = n / norm
        ref = np.array([0.0, 1.0, 0.0])
        u = ref - ref.dot(n) * n
        if np.linalg.norm(u) < 1e-12:
            ref = np.array([1.0, 0.0, 0.0])
            u = ref - ref.dot(n) * n
        u = u / np.linalg.norm(u)
        v = np.cross(n, u)
        return n, u, v


@dataclass(frozen=True, eq=False)
class Fracture:
    """A fracture as a point cloud (m), with a unit normal when it is planar."""

    points: np.ndarray
    normal: np.ndarray | None = None
    plane: PlanarFracture | None = None


@dataclass(frozen=True, eq=False)
class FractureSet:
    """All fractures of a core plus their shared aperture e_V (m).

    ``spacing`` is the lattice spacing the clouds were extracted at; it sets
    the tolerance for points lying on the inlet and outlet planes.
    """

    fractures: tuple[Fracture, ...] = ()
    aperture: float = 1e-3
    spacing: float = 1e-3
    _points: np.ndarray = field(init=False, repr=False)
    _ids: np.ndarray = field(init=False, repr=False)
    _normals: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.aperture > 0.0:
            raise GeometryError(f"fracture aperture must be > 0, got {self.aperture}")
        if self.fractures:
            points = np.concatenate([f.points for f in self.fractures])
            ids = np.concatenate([np.full(len(f.points), i) for i, f in enumerate(self.fractures)])
            normals = np.concatenate([
                np.broadcast_to(f.normal if f.normal is not None else np.zeros(3), f.points.shape)
                for f in self.fractures
            ])
        else:
            points, ids, normals = np.empty((0, 3)), np.empty(0, dtype=int), np.empty((0, 3))
        object.__setattr__(self, "_points", np.ascontiguousarray(points, dtype=float))
        object.__setattr__(self, "_ids", ids.astype(int))
        object.__setattr__(self, "_normals", np.ascontiguousarray(normals, dtype=float))

    def __len__(self) -> int:
        return len(self._points)

    @property
    def points(self) -> np.ndarray:
        """All fracture points stacked, shape (N_F, 3)."""
        return self._points

    @property
    def ids(self) -> np.ndarray:
        """Fracture index of every stacked point."""
        return self._ids

    @property
    def normals(self) -> np.ndarray:
        """Unit normal per point; zero rows where the fracture is not planar."""
        return self._normals

    def inlet_mask(self, tolerance: float | None = None) -> np.ndarray:
        """Points on the y=0 plane within half a lattice spacing."""
        tol = self.spacing / 2.0 if tolerance is None else tolerance
        return np.abs(self._points[:, 1]) < tol

    def connected_to_inlet(self) -> np.ndarray:
        """Per-point flag: the point's fracture touches the inlet plane."""
        inlet_ids = np.unique(self._ids[self.inlet_mask()])
        return np.isin(self._ids, inlet_ids)


def planar_fracture(geom: CoreGeometry, plane: PlanarFracture, spacing: float) -> Fracture:
    """Discretize a planar fracture at the matrix lattice spacing.

    Points outside the core (laterally or beyond the end faces) are dropped.
    """
    if not spacing > 0.0:
        raise GeometryError(f"fracture spacing must be > 0, got {spacing}")
    n, u, v = plane.basis()
    origin = np.asarray(plane.origin, dtype=float)
    nu = int(round(plane.extent[0] / spacing)) + 1
    su = np.linspace(-plane.extent[0] / 2.0, plane.extent[0] / 2.0, nu)
    if geom.is_slab:
        sv = np.zeros(1)
    else:
        nv = int(round(plane.extent[1] / spacing)) + 1
        sv = np.linspace(-plane.extent[1] / 2.0, plane.extent[1] / 2.0, nv)
    uu, vv = np.meshgrid(su, sv, indexing="ij")
    points = origin + uu.reshape(-1, 1) * u + vv.reshape(-1, 1) * v
    if geom.is_slab:
        points[:, 2] = 0.0

    tol = 1e-12 * geom.length
    keep = geom.inside(points) & (points[:, 1] >= -tol) & (points[:, 1] <= geom.length + tol)
    points = points[keep]
    points[:, 1] = np.clip(points[:, 1], 0.0, geom.length)
    if len(points) == 0:
        raise GeometryError(f"planar fracture at {plane.origin} lies outside the core")
    logger.debug(f"Discretized planar fracture at {plane.origin} into {len(points)} points")
    return Fracture(points=points, normal=n, plane=plane)


def load_fracture_csv(path: Path, aperture: float, spacing: float) -> FractureSet:
    """Read a ``x_m,y_m,z_m,fracture_id`` point-cloud file.

    Raises:
        FractureFileError: If the header or a row is malformed
    """
    groups: dict[int, list[list[float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != FRACTURE_COLUMNS:
            raise FractureFileError(f"{path}: expected header {','.join(FRACTURE_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                x, y, z, fid = float(row[0]), float(row[1]), float(row[2]), int(row[3])
            except (ValueError, IndexError) as e:
                raise FractureFileError(f"{path}:{lineno}: {e}") from e
            groups.setdefault(fid, []).append([x, y, z])

    fractures = tuple(Fracture(points=np.asarray(groups[k], dtype=float)) for k in sorted(groups))
    return FractureSet(fractures=fractures, aperture=aperture, spacing=spacing)


def write_fracture_csv(path: Path, fractures: FractureSet) -> Path:
    """Write a fracture set in the point-cloud CSV format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FRACTURE_COLUMNS)
        for p, fid in zip(fractures.points, fractures.ids):
            writer.writerow([repr(float(p[0])), repr(float(p[1])), repr(float(p[2])), int(fid)])
    return path


def check_fractures_inside(geom: CoreGeometry, fractures: FractureSet) -> None:
    """Raise GeometryError if any fracture point lies outside the core."""
    if len(fractures) == 0:
        return
    pts = fractures.points
    tol = 1e-9 * geom.length
    outside = ~geom.inside(pts) | (pts[:, 1] < -tol) | (pts[:, 1] > geom.length + tol)
    if outside.any():
        first = pts[np.argmax(outside)]
        raise GeometryError(
            f"{int(outside.sum())} fracture points outside the core, first at {first.tolist()}"
        )


def inlet_areas(
    geom: CoreGeometry,
    fractures: FractureSet,
    dy: float | None = None,
) -> tuple[float, float]:
    """Split the inlet face into matrix and fracture areas.

    Each distinct fracture point on the y=0 plane covers a disk of diameter
    e_V (a strip e_V wide and ``depth`` deep for slabs). Points closer than
    e_V to an already counted point are treated as overlapping.

    Returns:
        (A_m, A_f) in m²

    Raises:
        InletAreaError: If the fracture area reaches the full face
    """
    e_v = fractures.aperture
    tolerance = (dy if dy is not None else fractures.spacing) / 2.0
    total = geom.cross_section
    if len(fractures) == 0:
        return total, 0.0

    inlet = fractures.points[fractures.inlet_mask(tolerance)]
    if len(inlet) == 0:
        return total, 0.0

    snapped = np.round(inlet[:, [0, 2]] / e_v).astype(np.int64)
    count = len(np.unique(snapped, axis=0))
    per_point = e_v * geom.depth if geom.is_slab else math.pi * (e_v / 2.0) ** 2
    a_f = count * per_point
    if a_f >= total:
        raise InletAreaError(f"fracture inlet area {a_f:.3e} m² >= face area {total:.3e} m²")
    return total - a_f, a_f
