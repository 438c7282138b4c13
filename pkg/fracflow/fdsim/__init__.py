"""fracflow fdsim - IMPES reference simulator, Buckley-Leverett and simplex history matching."""

from fracflow.fdsim.exceptions import (
    SimulationError,
    SingularSystemError,
    TimeStepUnderflowError,
    WelgeConstructionError,
)
from fracflow.fdsim.grid import Medium, Faces, BoundaryFaces, Grid, build_grid
from fracflow.fdsim.impes import (
    MIN_SUBSTEP,
    SimSchedule,
    FaceFlux,
    FDState,
    StepReport,
    SimulationResult,
    initial_state,
    pressure_step,
    saturation_step,
    recovery_factor,
    injection_rate,
    simulate,
    front_position,
)
from fracflow.fdsim.buckley import (
    WelgeShock,
    total_velocity,
    dfw_dS,
    welge_shock,
    shock_position,
    bl_saturation,
    bl_profile,
)
from fracflow.fdsim.optimize import NelderMeadOptions, NelderMeadResult, nelder_mead
from fracflow.fdsim.histmatch import FAILURE_PENALTY, HistMatchResult, histmatch_fd

__all__ = [
    "SimulationError",
    "SingularSystemError",
    "TimeStepUnderflowError",
    "WelgeConstructionError",
    "Medium",
    "Faces",
    "BoundaryFaces",
    "Grid",
    "build_grid",
    "MIN_SUBSTEP",
    "SimSchedule",
    "FaceFlux",
    "FDState",
    "StepReport",
    "SimulationResult",
    "initial_state",
    "pressure_step",
    "saturation_step",
    "recovery_factor",
    "injection_rate",
    "simulate",
    "front_position",
    "WelgeShock",
    "total_velocity",
    "dfw_dS",
    "welge_shock",
    "shock_position",
    "bl_saturation",
    "bl_profile",
    "NelderMeadOptions",
    "NelderMeadResult",
    "nelder_mead",
    "FAILURE_PENALTY",
    "HistMatchResult",
    "histmatch_fd",
]
