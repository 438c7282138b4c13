"""Geometry and collocation exceptions."""

from fracflow.exceptions import ConfigurationError, FracFlowError


class GeometryError(FracFlowError):
    """Base exception for core and fracture geometry errors."""


class EmptyLatticeError(GeometryError, ConfigurationError):
    """No matrix lattice point survives the cylinder and exclusion filters."""


class InletAreaError(GeometryError, ConfigurationError):
    """Fracture inlet area covers the whole inlet face."""


class FractureFileError(GeometryError):
    """Fracture point-cloud file is malformed."""


class InvariantViolationError(GeometryError):
    """A collocation set breaks one of its construction invariants."""
