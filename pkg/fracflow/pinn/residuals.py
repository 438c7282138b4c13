"""Mass-conservation residuals of both phases in matrix and fracture.

Residuals are pointwise rho_i * (phi * ds_i/dt - div(K kr_i/mu_i grad p_i)),
with p_w = p_nw - pc and s_nw = 1 - s_w. The matrix-fracture transfer
enters the matrix with a minus sign and the fracture with a plus sign.
"""

from dataclasses import dataclass

import numpy as np
import torch

from fracflow.autodiff import DTYPE, gradient
from fracflow.closure import (
    SaturationFunctions,
    capillary_pressure,
    clamp_open,
    normalized_saturation,
    rel_perm,
)
from fracflow.pinn.exceptions import NonFiniteResidualError
from fracflow.problem import FlowProblem


def kappa_constants(problem: FlowProblem) -> tuple[float, float]:
    """Pressure scale kappa_p (Pa) and residual scale kappa_r (s·m³/kg)."""
    fl = problem.fluids
    kappa_p = (problem.p_in + problem.p_out) / 2.0
    kappa_r = problem.t_max / ((float(fl.rho_w) + float(fl.rho_nw)) / 2.0)
    return float(kappa_p), float(kappa_r)


def transfer_term(p_m, p_f, kr, mu, permeability, rho, aperture):
    """Mass source into the fracture per unit volume from the matrix, kg/(m³·s).

    The normal Darcy velocity is -K (kr/mu) (p_m - p_f) / (e_V/2) and the
    term is (rho / e_V) * 2 * v_perp.
    """
    v_perp = -permeability * (kr / mu) * (p_m - p_f) / (aperture / 2.0)
    return rho / aperture * 2.0 * v_perp


@dataclass(frozen=True, eq=False)
class PhaseState:
    """Saturation, both phase pressures and relative permeabilities at a batch of points."""

    s_w: torch.Tensor
    p_nw: torch.Tensor
    p_w: torch.Tensor
    krw: torch.Tensor
    krnw: torch.Tensor


def window(f: SaturationFunctions) -> tuple:
    """Mobile saturation window (s_wc, 1 - s_nwr) of a closure."""
    return f.corey.s_wc, 1.0 - f.corey.s_nwr


def phase_state(s_w: torch.Tensor, p_nw: torch.Tensor, f: SaturationFunctions) -> PhaseState:
    """Closure evaluation on network outputs, clamped off the saturation endpoints."""
    S = clamp_open(normalized_saturation(s_w, f.corey.s_wc, f.corey.s_nwr))
    krw, krnw = rel_perm(S, f.corey)
    pc = capillary_pressure(S, f)
    return PhaseState(s_w=s_w, p_nw=p_nw, p_w=p_nw - pc, krw=krw, krnw=krnw)


def as_points(points, requires_grad: bool = True) -> torch.Tensor:
    """(n, 4) float64 tensor of (x, y, z, t) rows, optionally a gradient leaf."""
    X = torch.as_tensor(np.asarray(points, dtype=float), dtype=DTYPE)
    return X.clone().requires_grad_(requires_grad)


def tangential_projector(normals, axes) -> torch.Tensor | None:
    """Per point I - n n^T on the spatial axes; None when no normal is known."""
    if normals is None:
        return None
    n = torch.as_tensor(np.asarray(normals, dtype=float)[:, list(axes)], dtype=DTYPE)
    norm = n.norm(dim=1, keepdim=True)
    n = torch.where(norm > 0.0, n / torch.where(norm > 0.0, norm, torch.ones_like(norm)), torch.zeros_like(n))
    eye = torch.eye(len(axes), dtype=DTYPE).expand(len(n), -1, -1)
    return eye - n[:, :, None] * n[:, None, :]


def divergence(mobility, p, X, axes, projector=None) -> torch.Tensor:
    """div(mobility * grad p) over ``axes``, tangential when a projector is given."""
    g = gradient(p, X)[:, list(axes)]
    if projector is not None:
        g = torch.einsum("nij,nj->ni", projector, g)
    q = mobility[:, None] * g
    out = torch.zeros_like(p)
    for j in range(len(axes)):
        dq = gradient(q[:, j], X)[:, list(axes)]
        if projector is None:
            out = out + dq[:, j]
        else:
            out = out + (projector[:, :, j] * dq).sum(dim=1)
    return out


def check_finite(r: torch.Tensor, X: torch.Tensor, name: str) -> None:
    """Raise NonFiniteResidualError naming the first bad point."""
    bad = ~torch.isfinite(r)
    if bad.any():
        i = int(torch.nonzero(bad)[0, 0])
        point = tuple(float(v) for v in X[i].detach())
        raise NonFiniteResidualError(f"non-finite {name} residual at (x, y, z, t) = {point}", point)


def _conservation(X, state: PhaseState, f: SaturationFunctions, problem: FlowProblem, projector=None):
    fl = problem.fluids
    axes = problem.geometry.spatial_axes
    ds_dt = gradient(state.s_w, X)[:, 3]
    r_w = fl.rho_w * (f.porosity * ds_dt - divergence(f.permeability * state.krw / fl.mu_w, state.p_w, X, axes, projector))
    r_nw = fl.rho_nw * (-f.porosity * ds_dt - divergence(f.permeability * state.krnw / fl.mu_nw, state.p_nw, X, axes, projector))
    return r_w, r_nw


def matrix_state(X, nets, problem: FlowProblem) -> PhaseState:
    f = problem.matrix
    s, p = nets.matrix(X, window(f))
    return phase_state(s, p, f)


def fracture_state(X, nets, problem: FlowProblem) -> PhaseState:
    f = problem.fracture
    s, p = nets.fracture(X, window(f))
    return phase_state(s, p, f)


def transfer_pair(matrix: PhaseState, fracture: PhaseState, problem: FlowProblem):
    """Water and non-wetting transfer into the fracture at shared points.

    Matrix relative permeabilities and permeability set the normal
    conductance.
    """
    fl = problem.fluids
    K = problem.matrix.permeability
    e_v = problem.fractures.aperture
    t_w = transfer_term(matrix.p_w, fracture.p_w, matrix.krw, fl.mu_w, K, fl.rho_w, e_v)
    t_nw = transfer_term(matrix.p_nw, fracture.p_nw, matrix.krnw, fl.mu_nw, K, fl.rho_nw, e_v)
    return t_w, t_nw


def matrix_residuals(X, nets, problem: FlowProblem):
    """Pointwise matrix residuals (r_w, r_nw) at rows of X."""
    state = matrix_state(X, nets, problem)
    r_w, r_nw = _conservation(X, state, problem.matrix, problem)
    check_finite(r_w, X, "matrix water")
    check_finite(r_nw, X, "matrix non-wetting")
    return r_w, r_nw


def matrix_fracture_residuals(X, nets, problem: FlowProblem):
    """Pointwise matrix residuals with the transfer to the co-located fracture removed."""
    m = matrix_state(X, nets, problem)
    fr = fracture_state(X, nets, problem)
    r_w, r_nw = _conservation(X, m, problem.matrix, problem)
    t_w, t_nw = transfer_pair(m, fr, problem)
    r_w, r_nw = r_w - t_w, r_nw - t_nw
    check_finite(r_w, X, "matrix-fracture water")
    check_finite(r_nw, X, "matrix-fracture non-wetting")
    return r_w, r_nw


def fracture_residuals(X, nets, problem: FlowProblem, normals=None, coupled: bool = True):
    """Pointwise fracture residuals with in-plane divergence.

    Without ``coupled`` the fracture is solved on its own, ignoring the matrix.
    """
    projector = tangential_projector(normals, problem.geometry.spatial_axes)
    fr = fracture_state(X, nets, problem)
    r_w, r_nw = _conservation(X, fr, problem.fracture, problem, projector)
    if coupled:
        t_w, t_nw = transfer_pair(matrix_state(X, nets, problem), fr, problem)
        r_w, r_nw = r_w + t_w, r_nw + t_nw
    check_finite(r_w, X, "fracture water")
    check_finite(r_nw, X, "fracture non-wetting")
    return r_w, r_nw


def _scaled_mae(r_w, r_nw, kappa_r):
    return r_w.abs().mean() / kappa_r, r_nw.abs().mean() / kappa_r


def residual_matrix(points, nets, problem: FlowProblem, kappa_r: float | None = None):
    """(L_w, L_nw) over matrix points: residual MAE divided by kappa_r."""
    kappa_r = kappa_constants(problem)[1] if kappa_r is None else kappa_r
    X = as_points(points)
    return _scaled_mae(*matrix_residuals(X, nets, problem), kappa_r)


def residual_matrix_fracture(points, nets, problem: FlowProblem, kappa_r: float | None = None):
    """(L_w, L_nw) over matrix-fracture points including the transfer term."""
    kappa_r = kappa_constants(problem)[1] if kappa_r is None else kappa_r
    X = as_points(points)
    return _scaled_mae(*matrix_fracture_residuals(X, nets, problem), kappa_r)


def residual_fracture(
    points,
    nets,
    problem: FlowProblem,
    normals=None,
    coupled: bool = True,
    kappa_r: float | None = None,
):
    """(L_w, L_nw) over fracture points."""
    kappa_r = kappa_constants(problem)[1] if kappa_r is None else kappa_r
    X = as_points(points)
    return _scaled_mae(*fracture_residuals(X, nets, problem, normals, coupled), kappa_r)
