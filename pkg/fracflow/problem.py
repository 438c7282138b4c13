"""Complete statement of a fractured-core imbibition problem."""

from dataclasses import dataclass, replace
from typing import Mapping

from fracflow.closure import (
    FluidProps,
    SaturationFunctions,
    detach_closure,
    validate_fluids,
    validate_saturation_functions,
)
from fracflow.exceptions import ConfigurationError
from fracflow.geometry import CoreGeometry, FractureSet, check_fractures_inside

COREY_FIELDS = ("krw_max", "krnw_max", "n_w1", "n_w2", "n_nw1", "n_nw2", "s_wc", "s_nwr")
LEVERETT_FIELDS = ("J1", "J2", "sigma")
FRACTURE_FIELDS = ("K_F",)
PARAMETER_NAMES = COREY_FIELDS + LEVERETT_FIELDS + FRACTURE_FIELDS

# Parameters estimated by default in the synthetic benchmark
DEFAULT_INVERSE = ("krw_max", "krnw_max", "n_w1", "n_w2", "n_nw1", "n_nw2", "s_nwr", "J1", "J2", "K_F")


@dataclass(frozen=True, eq=False)
class FlowProblem:
    """Geometry, fluids, matrix and fracture closures, and boundary/initial data.

    Pressures are in Pa, times in s. The wetting phase enters at ``p_in``
    through y=0 and both phases leave at ``p_out`` through y=L.
    """

    geometry: CoreGeometry
    fluids: FluidProps
    matrix: SaturationFunctions
    fracture: SaturationFunctions
    fractures: FractureSet
    p_in: float
    p_out: float
    p_i: float
    t_max: float
    s_wi: float | None = None

    @property
    def initial_saturation(self) -> float:
        """Initial water saturation, s_wc unless set explicitly."""
        return self.matrix.corey.s_wc if self.s_wi is None else self.s_wi

    @property
    def pressure_drop(self) -> float:
        return self.p_in - self.p_out

    def validate(self) -> None:
        """Check every closure, the fluids and the fracture placement."""
        validate_fluids(self.fluids)
        validate_saturation_functions(self.matrix)
        validate_saturation_functions(self.fracture)
        check_fractures_inside(self.geometry, self.fractures)
        if not self.t_max > 0.0:
            raise ConfigurationError(f"t_max must be > 0, got {self.t_max}")
        s_min, s_max = self.matrix.corey.s_wc, self.matrix.corey.s_max
        if not s_min <= self.initial_saturation <= s_max:
            raise ConfigurationError(
                f"initial saturation {self.initial_saturation} outside mobile window [{s_min}, {s_max}]"
            )


def parameter_values(problem: FlowProblem, names=PARAMETER_NAMES) -> dict[str, float]:
    """Current float values of the named closure parameters."""
    matrix = detach_closure(problem.matrix)
    out = {}
    for name in names:
        if name in COREY_FIELDS:
            out[name] = getattr(matrix.corey, name)
        elif name in LEVERETT_FIELDS:
            out[name] = getattr(matrix.leverett, name)
        elif name == "K_F":
            out[name] = float(problem.fracture.permeability)
        else:
            raise ConfigurationError(f"unknown closure parameter '{name}'")
    return out


def with_parameters(problem: FlowProblem, values: Mapping[str, object]) -> FlowProblem:
    """Copy of the problem with closure parameters substituted.

    Values may be floats or 0-d tensors. Leverett magnitudes apply to the
    matrix; the fracture keeps its own linear kr and scaled pc.
    """
    unknown = set(values) - set(PARAMETER_NAMES)
    if unknown:
        raise ConfigurationError(f"unknown closure parameters: {sorted(unknown)}")

    corey = replace(problem.matrix.corey, **{k: v for k, v in values.items() if k in COREY_FIELDS})
    leverett = replace(problem.matrix.leverett, **{k: v for k, v in values.items() if k in LEVERETT_FIELDS})
    matrix = replace(problem.matrix, corey=corey, leverett=leverett)

    fracture = problem.fracture
    if "J1" in values or "J2" in values:
        fracture = replace(fracture, leverett=replace(
            fracture.leverett,
            J1=values.get("J1", fracture.leverett.J1),
            J2=values.get("J2", fracture.leverett.J2),
        ))
    if "K_F" in values:
        fracture = replace(fracture, permeability=values["K_F"])
    return replace(problem, matrix=matrix, fracture=fracture)
