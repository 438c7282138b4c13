"""Parameter sets for the matrix and fracture saturation functions.

Fields may hold plain floats or 0-d torch tensors. The latter is how the
inverse solver threads trainable parameters through the same closures the
reference simulator evaluates with floats.
"""

from dataclasses import dataclass

from fracflow.closure.exceptions import InvalidParameterError

# Endpoint clamp for every J and dJ/dSw evaluation
SATURATION_EPS = 1e-6


@dataclass(frozen=True)
class CoreyParams:
    """Extended Corey relative permeability with saturation-dependent exponents."""

    krw_max: float
    krnw_max: float
    n_w1: float
    n_w2: float
    n_nw1: float
    n_nw2: float
    s_wc: float = 0.0
    s_nwr: float = 0.0

    @property
    def s_max(self) -> float:
        """Highest mobile water saturation, 1 - s_nwr."""
        return 1.0 - self.s_nwr


@dataclass(frozen=True)
class LeverettParams:
    """Bentsen J-function shape and Leverett scaling."""

    J1: float
    J2: float
    sigma: float
    S_eq: float = 1.0 - SATURATION_EPS


@dataclass(frozen=True)
class FluidProps:
    """Wetting (water) and non-wetting (CO2) phase properties in SI units."""

    mu_w: float
    mu_nw: float
    rho_w: float
    rho_nw: float

    @property
    def mu_m(self) -> float:
        """Geometric mean viscosity used to normalize the CDC curve."""
        return (self.mu_w * self.mu_nw) ** 0.5


@dataclass(frozen=True)
class SaturationFunctions:
    """Complete closure for one medium: kr, J shape, porosity and permeability."""

    corey: CoreyParams
    leverett: LeverettParams
    porosity: float
    permeability: float


def validate_corey(p: CoreyParams) -> None:
    """Raise InvalidParameterError if a Corey parameter is out of range."""
    for name in ("krw_max", "krnw_max"):
        value = float(getattr(p, name))
        if not 0.0 < value <= 1.0:
            raise InvalidParameterError(f"{name} must be in (0, 1], got {value}")
    for name in ("n_w1", "n_w2", "n_nw1", "n_nw2"):
        value = float(getattr(p, name))
        if not value > 0.0:
            raise InvalidParameterError(f"{name} must be > 0, got {value}")
    for name in ("s_wc", "s_nwr"):
        value = float(getattr(p, name))
        if not 0.0 <= value < 1.0:
            raise InvalidParameterError(f"{name} must be in [0, 1), got {value}")
    if float(p.s_wc) + float(p.s_nwr) >= 1.0:
        raise InvalidParameterError(
            f"s_wc + s_nwr must be < 1, got {float(p.s_wc) + float(p.s_nwr)}"
        )


def validate_leverett(p: LeverettParams) -> None:
    """Raise InvalidParameterError if a J-function parameter is out of range."""
    if float(p.J1) < 0.0 or float(p.J2) < 0.0:
        raise InvalidParameterError(f"J1, J2 must be >= 0, got {float(p.J1)}, {float(p.J2)}")
    if not 0.0 < float(p.S_eq) < 1.0:
        raise InvalidParameterError(f"S_eq must be in (0, 1), got {float(p.S_eq)}")
    if not float(p.sigma) > 0.0:
        raise InvalidParameterError(f"sigma must be > 0, got {float(p.sigma)}")


def validate_fluids(fl: FluidProps) -> None:
    """Raise InvalidParameterError unless every fluid property is positive."""
    for name in ("mu_w", "mu_nw", "rho_w", "rho_nw"):
        value = float(getattr(fl, name))
        if not value > 0.0:
            raise InvalidParameterError(f"{name} must be > 0, got {value}")


def validate_saturation_functions(f: SaturationFunctions) -> None:
    """Validate a full closure, including rock properties."""
    validate_corey(f.corey)
    validate_leverett(f.leverett)
    if not 0.0 < float(f.porosity) < 1.0:
        raise InvalidParameterError(f"porosity must be in (0, 1), got {float(f.porosity)}")
    if not float(f.permeability) > 0.0:
        raise InvalidParameterError(f"permeability must be > 0, got {float(f.permeability)}")
