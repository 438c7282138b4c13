"""Tests for rasterizing cores and fractures onto the simulation grid."""

import numpy as np
import pytest

from fracflow.exceptions import ConfigurationError
from fracflow.fdsim import Medium, build_grid
from tests.fixtures import benchmark_problem, cylinder_geometry


def test_slab_grid_single_layer():
    """Slabs collapse to one z layer with every cell active."""
    grid = build_grid(benchmark_problem(with_fracture=False), (4, 8, 5))
    assert grid.shape == (4, 8, 1)
    assert grid.n_active == 32
    assert np.all(grid.medium == Medium.MATRIX)


def test_fracture_cells_tagged():
    """An axial fracture marks one column of cells along the flow direction."""
    problem = benchmark_problem()
    grid = build_grid(problem, (8, 12, 1))
    frac = grid.medium == Medium.FRACTURE
    assert frac.sum() == 12
    assert np.unique(np.argwhere(frac)[:, 0]).size == 1
    assert np.allclose(grid.porosity[frac], problem.fracture.porosity)
    assert np.allclose(grid.permeability[frac], problem.fracture.permeability, rtol=1e-12, atol=0.0)


def test_cylinder_grid_has_inactive_corners():
    """Cells outside the circular cross-section carry no flow."""
    grid = build_grid(benchmark_problem(geom=cylinder_geometry(), with_fracture=False), (6, 4, 6))
    assert (grid.medium == Medium.INACTIVE).any()
    assert grid.n_active < 6 * 4 * 6
    field = grid.scatter(np.ones(grid.n_active))
    assert np.isnan(field[0, 0, 0])
    assert grid.active(field).size == grid.n_active


def test_grid_resolution_errors():
    """Fewer than two cells along the flow axis cannot carry a flood."""
    with pytest.raises(ConfigurationError):
        build_grid(benchmark_problem(), (4, 1, 1))


def test_faces_mark_transfer():
    """Matrix-fracture faces are flagged as transfer connections."""
    grid = build_grid(benchmark_problem(), (8, 12, 1))
    faces = grid.faces()
    media = grid.cell_medium
    mixed = media[faces.a] != media[faces.b]
    assert np.array_equal(faces.transfer, mixed)
    assert faces.transfer.sum() == 24
    assert np.all(faces.trans > 0.0)


def test_boundary_faces():
    """Every end-face column has an inlet and an outlet face."""
    grid = build_grid(benchmark_problem(with_fracture=False), (4, 8, 1))
    bf = grid.boundary_faces()
    assert len(bf.cell) == 8
    assert bf.outlet.sum() == 4
    assert np.all(bf.trans > 0.0)


def test_pore_volume():
    """Pore volume is porosity times the full cell volume."""
    grid = build_grid(benchmark_problem(with_fracture=False), (4, 8, 1))
    assert grid.pore_volume.sum() == pytest.approx(0.10 * 0.025 * 0.058 * 0.01)
