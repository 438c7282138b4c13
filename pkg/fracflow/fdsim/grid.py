"""Structured grid of matrix, fracture and inactive cells."""

import logging
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from fracflow.closure import detach_closure
from fracflow.exceptions import ConfigurationError
from fracflow.problem import FlowProblem

logger = logging.getLogger(__name__)


class Medium(IntEnum):
    """Per-cell medium tag."""

    INACTIVE = -1
    MATRIX = 0
    FRACTURE = 1


@dataclass(frozen=True, eq=False)
class Faces:
    """Cell-to-cell connections between active cells.

    ``a`` and ``b`` index active cells; flux from a to b is positive.
    ``transfer`` marks matrix-fracture connections.
    """

    a: np.ndarray
    b: np.ndarray
    trans: np.ndarray
    axis: np.ndarray
    transfer: np.ndarray


@dataclass(frozen=True, eq=False)
class BoundaryFaces:
    """Inlet (y=0) and outlet (y=L) faces of active cells."""

    cell: np.ndarray
    trans: np.ndarray
    area: np.ndarray
    outlet: np.ndarray


@dataclass(frozen=True, eq=False)
class Grid:
    """Cell-centred lattice over the core with per-cell medium, porosity and permeability.

    Cells outside the lateral boundary are inactive and carry no flow.
    """

    shape: tuple[int, int, int]
    spacing: tuple[float, float, float]
    medium: np.ndarray
    porosity: np.ndarray
    permeability: np.ndarray
    aperture: float
    centres: tuple[np.ndarray, np.ndarray, np.ndarray]
    active_index: np.ndarray = field(init=False, repr=False)
    cells: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if min(self.spacing) <= 0.0:
            raise ConfigurationError(f"grid spacings must be > 0, got {self.spacing}")
        active = self.medium != Medium.INACTIVE
        index = np.full(self.shape, -1, dtype=np.int64)
        index[active] = np.arange(int(active.sum()))
        object.__setattr__(self, "active_index", index)
        object.__setattr__(self, "cells", np.argwhere(active))

    @property
    def n_active(self) -> int:
        return len(self.cells)

    @property
    def cell_volume(self) -> float:
        dx, dy, dz = self.spacing
        return dx * dy * dz

    def active(self, values: np.ndarray) -> np.ndarray:
        """Gather a full-shape array into active-cell order."""
        return values[self.medium != Medium.INACTIVE]

    def scatter(self, values: np.ndarray, fill: float = np.nan) -> np.ndarray:
        """Spread active-cell values onto the full lattice."""
        out = np.full(self.shape, fill, dtype=float)
        out[self.medium != Medium.INACTIVE] = values
        return out

    @property
    def cell_medium(self) -> np.ndarray:
        return self.active(self.medium)

    @property
    def pore_volume(self) -> np.ndarray:
        """Per active cell pore volume in m³."""
        return self.active(self.porosity) * self.cell_volume

    def faces(self) -> Faces:
        """Two-point connections with harmonic transmissibilities.

        A matrix-fracture face uses the matrix permeability on both halves,
        with the fracture half spanning e_V/2.
        """
        a_all, b_all, t_all, ax_all, mf_all = [], [], [], [], []
        K = self.permeability
        for axis, d in enumerate(self.spacing):
            n = self.shape[axis]
            if n < 2:
                continue
            area = self.cell_volume / d
            lo = [slice(None)] * 3
            hi = [slice(None)] * 3
            lo[axis] = slice(0, n - 1)
            hi[axis] = slice(1, n)
            lo, hi = tuple(lo), tuple(hi)
            ia, ib = self.active_index[lo].ravel(), self.active_index[hi].ravel()
            ma, mb = self.medium[lo].ravel(), self.medium[hi].ravel()
            ka, kb = K[lo].ravel(), K[hi].ravel()
            keep = (ia >= 0) & (ib >= 0)
            ia, ib, ma, mb, ka, kb = ia[keep], ib[keep], ma[keep], mb[keep], ka[keep], kb[keep]

            mf = ma != mb
            k_matrix = np.where(ma == Medium.MATRIX, ka, kb)
            half = self.aperture / 2.0 / k_matrix
            ra = np.where(mf & (ma == Medium.FRACTURE), half, d / (2.0 * ka))
            rb = np.where(mf & (mb == Medium.FRACTURE), half, d / (2.0 * kb))
            a_all.append(ia)
            b_all.append(ib)
            t_all.append(area / (ra + rb))
            ax_all.append(np.full(len(ia), axis))
            mf_all.append(mf)

        if not a_all:
            empty = np.empty(0)
            return Faces(empty.astype(int), empty.astype(int), empty, empty.astype(int), empty.astype(bool))
        return Faces(
            a=np.concatenate(a_all),
            b=np.concatenate(b_all),
            trans=np.concatenate(t_all),
            axis=np.concatenate(ax_all),
            transfer=np.concatenate(mf_all),
        )

    def boundary_faces(self) -> BoundaryFaces:
        """Half-cell transmissibilities from each end-face cell to its face."""
        dx, dy, dz = self.spacing
        area = dx * dz
        cells, trans, outlet = [], [], []
        for j, is_outlet in ((0, False), (self.shape[1] - 1, True)):
            idx = self.active_index[:, j, :].ravel()
            K = self.permeability[:, j, :].ravel()
            keep = idx >= 0
            cells.append(idx[keep])
            trans.append(2.0 * K[keep] * area / dy)
            outlet.append(np.full(int(keep.sum()), is_outlet))
        cell = np.concatenate(cells)
        return BoundaryFaces(
            cell=cell,
            trans=np.concatenate(trans),
            area=np.full(len(cell), area),
            outlet=np.concatenate(outlet),
        )

    def location(self, active_cell: int) -> tuple[float, float, float]:
        """Centre coordinates of an active cell, for diagnostics."""
        i, j, k = self.cells[active_cell]
        xs, ys, zs = self.centres
        return float(xs[i]), float(ys[j]), float(zs[k])


def build_grid(problem: FlowProblem, resolution: tuple[int, int, int]) -> Grid:
    """Rasterize the core and its fractures onto a cell-centred lattice.

    Each fracture point tags the active cell containing it; slabs use a
    single z layer.
    """
    geom = problem.geometry
    nx, ny, nz = resolution
    if geom.is_slab:
        nz = 1
    if nx < 1 or ny < 2 or nz < 1:
        raise ConfigurationError(f"grid resolution must be at least (1, 2, 1), got {resolution}")
    shape = (nx, ny, nz)
    xs, ys, zs = geom.lattice_axes(shape)
    spacing = geom.lattice_spacing(shape)

    X, _, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    probe = np.stack([X.ravel(), np.zeros(X.size), Z.ravel()], axis=1)
    medium = np.where(geom.inside(probe).reshape(shape), Medium.MATRIX, Medium.INACTIVE).astype(np.int8)

    frac = problem.fractures
    if len(frac):
        dx, dy, dz = spacing
        pts = frac.points
        i = np.clip(np.floor((pts[:, 0] + geom.radius) / dx).astype(int), 0, nx - 1)
        j = np.clip(np.floor(pts[:, 1] / dy).astype(int), 0, ny - 1)
        k = np.zeros(len(pts), dtype=int) if geom.is_slab else np.clip(
            np.floor((pts[:, 2] + geom.radius) / dz).astype(int), 0, nz - 1
        )
        hit = medium[i, j, k] != Medium.INACTIVE
        medium[i[hit], j[hit], k[hit]] = Medium.FRACTURE

    matrix = detach_closure(problem.matrix)
    fracture = detach_closure(problem.fracture)
    is_frac = medium == Medium.FRACTURE
    porosity = np.where(is_frac, fracture.porosity, matrix.porosity).astype(float)
    permeability = np.where(is_frac, fracture.permeability, matrix.permeability).astype(float)

    grid = Grid(
        shape=shape,
        spacing=spacing,
        medium=medium,
        porosity=porosity,
        permeability=permeability,
        aperture=frac.aperture,
        centres=(xs, ys, zs),
    )
    logger.debug(
        f"Grid {shape}: {grid.n_active} active cells, {int(is_frac.sum())} fracture cells"
    )
    return grid
