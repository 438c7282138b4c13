"""Saturation-dependent constitutive functions.

Every function accepts floats, numpy arrays or torch tensors and returns the
same kind. Saturations named ``S`` are normalized to the mobile window,
``sw`` are physical.
"""

import numpy as np
import torch
from scipy.integrate import trapezoid

from fracflow.closure.exceptions import InvalidParameterError, SingularEvaluationError
from fracflow.closure.params import (
    SATURATION_EPS,
    CoreyParams,
    FluidProps,
    LeverettParams,
    SaturationFunctions,
)


def _is_tensor(*values) -> bool:
    return any(isinstance(v, torch.Tensor) for v in values)


def _clip(x, lo: float, hi: float):
    if isinstance(x, torch.Tensor):
        return torch.clamp(x, lo, hi)
    return np.clip(x, lo, hi)


def _log(x):
    if isinstance(x, torch.Tensor):
        return torch.log(x)
    return np.log(x)


def _sqrt(x):
    if isinstance(x, torch.Tensor):
        return torch.sqrt(x)
    return np.sqrt(x)


def clamp_open(S):
    """Clamp normalized saturation into [eps, 1 - eps] for J evaluations."""
    return _clip(S, SATURATION_EPS, 1.0 - SATURATION_EPS)


def normalized_saturation(sw, swc, snwr):
    """Map physical water saturation onto the mobile window [0, 1].

    Raises:
        InvalidParameterError: If swc + snwr >= 1
    """
    if float(swc) + float(snwr) >= 1.0:
        raise InvalidParameterError(
            f"degenerate mobile window: s_wc + s_nwr = {float(swc) + float(snwr)}"
        )
    S = (sw - swc) / (1.0 - snwr - swc)
    return _clip(S, 0.0, 1.0)


def physical_saturation(S, swc, snwr):
    """Inverse of normalized_saturation on the mobile window."""
    return swc + S * (1.0 - snwr - swc)


def rel_perm(S, p: CoreyParams):
    """Extended Corey curves.

    Returns:
        (krw, krnw) with krw = krw_max * S^n_w and krnw = krnw_max * (1-S)^n_nw,
        where each exponent interpolates linearly in S between its two limits.
    """
    n_w = p.n_w1 * S + p.n_w2 * (1.0 - S)
    n_nw = p.n_nw1 * S + p.n_nw2 * (1.0 - S)
    krw = p.krw_max * S ** n_w
    krnw = p.krnw_max * (1.0 - S) ** n_nw
    return krw, krnw


def _check_open(S) -> None:
    if isinstance(S, torch.Tensor):
        bad = bool(((S <= 0.0) | (S >= 1.0)).any())
    else:
        arr = np.asarray(S)
        bad = bool(np.any((arr <= 0.0) | (arr >= 1.0)))
    if bad:
        raise SingularEvaluationError(
            "J-function evaluated at Sw = 0 or 1; clamp to [eps, 1 - eps] first"
        )


def leverett_j(S, p: LeverettParams):
    """Bentsen J-function, zero at S_eq and decreasing in S.

    Raises:
        SingularEvaluationError: If any S is at 0 or 1
    """
    _check_open(S)
    return -p.J1 * _log(S / p.S_eq) + p.J2 * _log((1.0 - S) / (1.0 - p.S_eq))


def dj_dsw(S, p: LeverettParams):
    """Analytic derivative of the J-function with respect to normalized saturation."""
    _check_open(S)
    return -p.J1 / S - p.J2 / (1.0 - S)


def capillary_pressure(S, f: SaturationFunctions):
    """Leverett-scaled capillary pressure in Pa."""
    scale = f.leverett.sigma * _sqrt(f.porosity / f.permeability)
    return scale * leverett_j(S, f.leverett)


def dpc_dsw(S, f: SaturationFunctions):
    """Derivative of capillary pressure with respect to normalized saturation."""
    scale = f.leverett.sigma * _sqrt(f.porosity / f.permeability)
    return scale * dj_dsw(S, f.leverett)


def mobilities(S, f: SaturationFunctions, fl: FluidProps):
    """Absolute phase mobilities K * kr / mu for water and non-wetting phase."""
    krw, krnw = rel_perm(S, f.corey)
    return f.permeability * krw / fl.mu_w, f.permeability * krnw / fl.mu_nw


def fractional_flow(S, f: SaturationFunctions, fl: FluidProps):
    """Water fraction of the total flux.

    Where both phases are immobile the normalized saturation itself is
    returned, giving 0 at S=0 and 1 at S=1.
    """
    lam_w, lam_nw = mobilities(S, f, fl)
    total = lam_w + lam_nw
    if _is_tensor(S, total):
        safe = torch.where(total > 0.0, total, torch.ones_like(total))
        return torch.where(total > 0.0, lam_w / safe, S * torch.ones_like(total))
    total = np.asarray(total, dtype=float)
    safe = np.where(total > 0.0, total, 1.0)
    out = np.where(total > 0.0, np.asarray(lam_w) / safe, S)
    return out if out.ndim else float(out)


def cdc_lambda(S, f: SaturationFunctions, fl: FluidProps):
    """Normalized capillary diffusion coefficient.

    Uses the relative non-wetting mobility krnw / mu_nw, so porosity and
    permeability drop out of the curve.
    """
    _, krnw = rel_perm(S, f.corey)
    fw = fractional_flow(S, f, fl)
    return fl.mu_m * (krnw / fl.mu_nw) * fw * (-dj_dsw(S, f.leverett))


def saturation_grid(n: int):
    """Uniform normalized-saturation grid on [eps, 1 - eps]."""
    return np.linspace(SATURATION_EPS, 1.0 - SATURATION_EPS, n)


def lambda_area(f: SaturationFunctions, fl: FluidProps, n: int = 1001) -> float:
    """Trapezoid integral of the CDC curve over the open mobile window."""
    if n < 2:
        raise InvalidParameterError(f"grid size must be >= 2, got {n}")
    S = saturation_grid(n)
    values = np.asarray(cdc_lambda(S, _as_float_closure(f), _as_float_fluids(fl)), dtype=float)
    return float(trapezoid(values, S))


def fracture_closure(
    matrix: SaturationFunctions,
    permeability: float,
    porosity: float,
    pc_scale: float = 1e-3,
) -> SaturationFunctions:
    """Build the fracture closure: linear kr with unit endpoints and a faint pc.

    The J shape is borrowed from the matrix and its Leverett magnitude is
    scaled by ``pc_scale``.
    """
    corey = CoreyParams(
        krw_max=1.0, krnw_max=1.0,
        n_w1=1.0, n_w2=1.0, n_nw1=1.0, n_nw2=1.0,
        s_wc=0.0, s_nwr=0.0,
    )
    lev = matrix.leverett
    leverett = LeverettParams(J1=lev.J1, J2=lev.J2, sigma=lev.sigma * pc_scale, S_eq=lev.S_eq)
    return SaturationFunctions(
        corey=corey, leverett=leverett, porosity=porosity, permeability=permeability,
    )


def _to_float(value) -> float:
    if isinstance(value, torch.Tensor):
        return float(value.detach())
    return float(value)


def _as_float_closure(f: SaturationFunctions) -> SaturationFunctions:
    c, lev = f.corey, f.leverett
    return SaturationFunctions(
        corey=CoreyParams(*(_to_float(getattr(c, k)) for k in (
            "krw_max", "krnw_max", "n_w1", "n_w2", "n_nw1", "n_nw2", "s_wc", "s_nwr"))),
        leverett=LeverettParams(
            J1=_to_float(lev.J1), J2=_to_float(lev.J2),
            sigma=_to_float(lev.sigma), S_eq=_to_float(lev.S_eq),
        ),
        porosity=_to_float(f.porosity),
        permeability=_to_float(f.permeability),
    )


def _as_float_fluids(fl: FluidProps) -> FluidProps:
    return FluidProps(*(_to_float(getattr(fl, k)) for k in ("mu_w", "mu_nw", "rho_w", "rho_nw")))


def detach_closure(f: SaturationFunctions) -> SaturationFunctions:
    """Copy of a closure with every tensor field replaced by its float value."""
    return _as_float_closure(f)
