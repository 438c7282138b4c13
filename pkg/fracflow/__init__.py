"""fracflow: two-phase flow in fractured cores.

Physics-informed networks, a finite-difference reference simulator and
history-matching tools for water/CO2 imbibition experiments.
"""

__version__ = "0.3.0"

from fracflow.exceptions import FracFlowError, ConfigurationError
from fracflow.closure import (
    CoreyParams,
    LeverettParams,
    FluidProps,
    SaturationFunctions,
)
from fracflow.geometry import CoreGeometry, FractureSet, CollocationSet
from fracflow.problem import FlowProblem

__all__ = [
    # Errors
    "FracFlowError",
    "ConfigurationError",
    # Closure
    "CoreyParams",
    "LeverettParams",
    "FluidProps",
    "SaturationFunctions",
    # Geometry
    "CoreGeometry",
    "FractureSet",
    "CollocationSet",
    # Problem
    "FlowProblem",
    # Version
    "__version__",
]
