"""fracflow closure - relative permeability, capillary pressure and CDC curves."""

from fracflow.closure.exceptions import (
    ClosureError,
    InvalidParameterError,
    SingularEvaluationError,
)
from fracflow.closure.params import (
    SATURATION_EPS,
    CoreyParams,
    LeverettParams,
    FluidProps,
    SaturationFunctions,
    validate_corey,
    validate_leverett,
    validate_fluids,
    validate_saturation_functions,
)
from fracflow.closure.curves import (
    clamp_open,
    normalized_saturation,
    physical_saturation,
    rel_perm,
    leverett_j,
    dj_dsw,
    capillary_pressure,
    dpc_dsw,
    mobilities,
    fractional_flow,
    cdc_lambda,
    saturation_grid,
    lambda_area,
    fracture_closure,
    detach_closure,
)
from fracflow.closure.export import CURVE_COLUMNS, curve_table, write_curves_csv
from fracflow.closure.units import MD_TO_M2, PSI_TO_PA, BAR_TO_PA, CP_TO_PA_S

__all__ = [
    # Exceptions
    "ClosureError",
    "InvalidParameterError",
    "SingularEvaluationError",
    # Parameters
    "SATURATION_EPS",
    "CoreyParams",
    "LeverettParams",
    "FluidProps",
    "SaturationFunctions",
    "validate_corey",
    "validate_leverett",
    "validate_fluids",
    "validate_saturation_functions",
    # Curves
    "clamp_open",
    "normalized_saturation",
    "physical_saturation",
    "rel_perm",
    "leverett_j",
    "dj_dsw",
    "capillary_pressure",
    "dpc_dsw",
    "mobilities",
    "fractional_flow",
    "cdc_lambda",
    "saturation_grid",
    "lambda_area",
    "fracture_closure",
    "detach_closure",
    # Export
    "CURVE_COLUMNS",
    "curve_table",
    "write_curves_csv",
    # Units
    "MD_TO_M2",
    "PSI_TO_PA",
    "BAR_TO_PA",
    "CP_TO_PA_S",
]
