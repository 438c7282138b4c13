"""Buckley-Leverett targets that pin the fracture during pre-training."""

import logging
from dataclasses import dataclass

import numpy as np
import torch

from fracflow.autodiff import DTYPE
from fracflow.closure import detach_closure, physical_saturation
from fracflow.fdsim import bl_saturation, total_velocity
from fracflow.pinn.losses import mae
from fracflow.pinn.residuals import as_points, kappa_constants, window
from fracflow.problem import FlowProblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PretrainTargets:
    """Target fracture saturation and pressure at each matrix-fracture row."""

    s_w: np.ndarray
    p_nw: np.ndarray
    u_t: float


def pretrain_targets(points, problem: FlowProblem, connected=None) -> PretrainTargets:
    """Welge-solution saturation and linear pressure along the fracture path.

    The path coordinate is the distance y from the inlet face. Rows flagged
    False in ``connected`` belong to fractures that never reach the inlet and
    keep the initial fracture state.
    """
    points = np.asarray(points, dtype=float)
    f = detach_closure(problem.fracture)
    fl = problem.fluids
    length = problem.geometry.length
    y, t = points[:, 1], points[:, 3]

    u_t = total_velocity(f, f.permeability, fl.mu_w, problem.pressure_drop, length)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.where(t > 0.0, y * f.porosity / (u_t * t), np.inf) if u_t > 0.0 else np.full(len(y), np.inf)
    s_w = physical_saturation(bl_saturation(f, fl, xi), f.corey.s_wc, f.corey.s_nwr)
    p = problem.p_in + (problem.p_out - problem.p_in) * y / length

    if connected is not None:
        connected = np.asarray(connected, dtype=bool)
        s_w = np.where(connected, s_w, f.corey.s_wc)
        p = np.where(connected, p, problem.p_i)
        if not connected.all():
            logger.debug(f"{int((~connected).sum())} fracture rows not connected to the inlet")
    return PretrainTargets(s_w=np.asarray(s_w, dtype=float), p_nw=np.asarray(p, dtype=float), u_t=u_t)


def pretrain_losses(
    points,
    nets,
    targets: PretrainTargets,
    xi: torch.Tensor,
    problem: FlowProblem,
    kappa_p: float | None = None,
) -> dict[str, torch.Tensor]:
    """Matrix-to-target mismatch at the fracture, scaled per point by xi.

    Returns:
        {"L_PT_sw_MF", "L_PT_pnw_MF", "L_xi_MF"}
    """
    kappa_p = kappa_constants(problem)[0] if kappa_p is None else kappa_p
    s, p = nets.matrix(as_points(points, False), window(problem.matrix))
    s_target = torch.as_tensor(targets.s_w, dtype=DTYPE)
    p_target = torch.as_tensor(targets.p_nw, dtype=DTYPE)
    return {
        "L_PT_sw_MF": mae((s - s_target) * xi),
        "L_PT_pnw_MF": mae((p - p_target) * xi) / kappa_p,
        "L_xi_MF": mae(xi, 1.0),
    }

