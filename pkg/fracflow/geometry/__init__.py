"""fracflow geometry - core domain, fracture clouds and collocation sets."""

from fracflow.geometry.exceptions import (
    GeometryError,
    EmptyLatticeError,
    InletAreaError,
    FractureFileError,
    InvariantViolationError,
)
from fracflow.geometry.core import (
    Shape,
    CoreGeometry,
    PlanarFracture,
    Fracture,
    FractureSet,
    planar_fracture,
    load_fracture_csv,
    write_fracture_csv,
    check_fractures_inside,
    inlet_areas,
)
from fracflow.geometry.temporal import Spacing, TemporalSampler, sample_times, assign_times
from fracflow.geometry.collocation import (
    DEFAULT_RESOLUTION,
    DEFAULT_EXCLUSION,
    Tag,
    CollocationSet,
    sample_matrix_points,
    sample_boundary_points,
    build_collocation,
    resample,
    check_invariants,
    write_collocation_csv,
)

__all__ = [
    # Exceptions
    "GeometryError",
    "EmptyLatticeError",
    "InletAreaError",
    "FractureFileError",
    "InvariantViolationError",
    # Core and fractures
    "Shape",
    "CoreGeometry",
    "PlanarFracture",
    "Fracture",
    "FractureSet",
    "planar_fracture",
    "load_fracture_csv",
    "write_fracture_csv",
    "check_fractures_inside",
    "inlet_areas",
    # Time
    "Spacing",
    "TemporalSampler",
    "sample_times",
    "assign_times",
    # Collocation
    "DEFAULT_RESOLUTION",
    "DEFAULT_EXCLUSION",
    "Tag",
    "CollocationSet",
    "sample_matrix_points",
    "sample_boundary_points",
    "build_collocation",
    "resample",
    "check_invariants",
    "write_collocation_csv",
]
