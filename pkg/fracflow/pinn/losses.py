"""Condition, data and weighting losses, and their weighted total."""

import logging
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import torch

from fracflow.autodiff import DTYPE, gradient
from fracflow.closure import capillary_pressure, clamp_open, normalized_saturation
from fracflow.exceptions import ConfigurationError
from fracflow.geometry import CollocationSet, Tag
from fracflow.pinn.exceptions import DivergenceError
from fracflow.pinn.residuals import (
    as_points,
    fracture_state,
    kappa_constants,
    matrix_state,
    window,
)
from fracflow.problem import FlowProblem

logger = logging.getLogger(__name__)

# Terms that enter the total loss, grouped by domain
MATRIX_TERMS = (
    "L_PI_M", "L_omega_M",
    "L_IC_sw_M", "L_IC_pnw_M", "L_BC0_sw_M", "L_BC0_pnw_M", "L_BC1_pnw_M", "L_BCr_M",
    "L_PI_MF", "L_omega_MF", "L_PT_sw_MF", "L_PT_pnw_MF", "L_xi_MF",
)
FRACTURE_TERMS = (
    "L_PI_F", "L_omega_F",
    "L_IC_sw_F", "L_IC_pnw_F", "L_BC0_sw_F", "L_BC0_pnw_F", "L_BC1_pnw_F",
)
DATA_TERMS = ("L_RF", "L_sw", "L_Qinj")
# Unweighted residual MAEs, logged but not summed
DIAGNOSTIC_TERMS = ("L_w_M", "L_nw_M", "L_w_MF", "L_nw_MF", "L_w_F", "L_nw_F")
LOSS_TERMS = MATRIX_TERMS + FRACTURE_TERMS + DATA_TERMS
CONDITION_TERMS = tuple(
    k for k in LOSS_TERMS if k.startswith(("L_IC_", "L_BC"))
)


def mae(pred, target=0.0):
    """Mean absolute error of tensors or arrays."""
    if isinstance(pred, torch.Tensor):
        return (pred - target).abs().mean()
    return float(np.mean(np.abs(np.asarray(pred) - np.asarray(target))))


def nmae(pred, truth) -> float:
    """MAE divided by the mean absolute truth; invariant to a common positive scale."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    scale = float(np.mean(np.abs(truth)))
    if scale == 0.0:
        raise ConfigurationError("NMAE is undefined for an all-zero truth curve")
    return float(np.mean(np.abs(pred - truth))) / scale


def threshold(e, tau: float, w: float = 1.0):
    """max(0, e - tau) * w."""
    if isinstance(e, torch.Tensor):
        return torch.clamp(e - tau, min=0.0) * w
    return max(0.0, e - tau) * w


def adaptive_weighting(r_w: torch.Tensor, r_nw: torch.Tensor, omega: torch.Tensor, kappa_r: float):
    """Pointwise e^omega weighting of the scaled residual pair.

    Returns:
        (L_PI, L_omega) with L_PI = mean((|r_w| + |r_nw|) / kappa_r * e^omega)
        and L_omega = mean(|omega|)
    """
    weighted = (r_w.abs() + r_nw.abs()) / kappa_r * torch.exp(omega)
    return weighted.mean(), omega.abs().mean()


def _require(colloc: CollocationSet, *tags: Tag) -> None:
    missing = [t.value for t in tags if t not in colloc.points]
    if missing:
        raise ConfigurationError(f"collocation set lacks tags {missing}")


def _at_time(points: np.ndarray, t: float) -> np.ndarray:
    out = np.array(points, dtype=float)
    out[:, 3] = t
    return out


def _inlet_pressure(s, f, p_in):
    """p_nw that puts the wetting phase at p_in for saturation s."""
    S = clamp_open(normalized_saturation(s, f.corey.s_wc, f.corey.s_nwr))
    return p_in + capillary_pressure(S, f)


def loss_ic_bc(
    colloc: CollocationSet,
    nets,
    problem: FlowProblem,
    kappa_p: float | None = None,
) -> dict[str, torch.Tensor]:
    """Initial, inlet, outlet and side-wall condition losses for matrix and fracture.

    Raises:
        ConfigurationError: If a required tag is missing
    """
    _require(colloc, Tag.INITIAL, Tag.INLET, Tag.OUTLET, Tag.RADIAL)
    kappa_p = kappa_constants(problem)[0] if kappa_p is None else kappa_p
    f = problem.matrix
    s_max = 1.0 - f.corey.s_nwr
    out: dict[str, torch.Tensor] = {}

    s, p = nets.matrix(as_points(colloc[Tag.INITIAL], False), window(f))
    out["L_IC_sw_M"] = mae(s, problem.initial_saturation)
    out["L_IC_pnw_M"] = mae(p, problem.p_i) / kappa_p

    s, p = nets.matrix(as_points(colloc[Tag.INLET], False), window(f))
    out["L_BC0_sw_M"] = mae(s, s_max)
    out["L_BC0_pnw_M"] = mae(p, _inlet_pressure(s, f, problem.p_in)) / kappa_p

    _, p = nets.matrix(as_points(colloc[Tag.OUTLET], False), window(f))
    out["L_BC1_pnw_M"] = mae(p, problem.p_out) / kappa_p

    X = as_points(colloc[Tag.RADIAL])
    _, p = nets.matrix(X, window(f))
    g = gradient(p, X)
    lateral = sum(g[:, axis] for axis in problem.geometry.lateral_axes)
    out["L_BCr_M"] = mae(lateral) / kappa_p

    fractures = colloc.fractures
    if len(fractures) == 0 or Tag.FRACTURE not in colloc.points:
        return out

    ff = problem.fracture
    rows = colloc[Tag.FRACTURE]
    s, p = nets.fracture(as_points(_at_time(rows, 0.0), False), window(ff))
    out["L_IC_sw_F"] = mae(s, ff.corey.s_wc)
    out["L_IC_pnw_F"] = mae(p, problem.p_i) / kappa_p

    inlet = fractures.inlet_mask()
    if inlet.any():
        pts = np.array(rows[inlet])
        pts[:, 1] = 0.0
        s, p = nets.fracture(as_points(pts, False), window(ff))
        out["L_BC0_sw_F"] = mae(s, 1.0 - ff.corey.s_nwr)
        out["L_BC0_pnw_F"] = mae(p, _inlet_pressure(s, ff, problem.p_in)) / kappa_p

    length = colloc.geometry.length
    outlet = np.abs(fractures.points[:, 1] - length) < fractures.spacing / 2.0
    if outlet.any():
        pts = np.array(rows[outlet])
        pts[:, 1] = length
        _, p = nets.fracture(as_points(pts, False), window(ff))
        out["L_BC1_pnw_F"] = mae(p, problem.p_out) / kappa_p
    return out


def loss_data_rf(nets, points, t_r: float, observed: float, problem: FlowProblem) -> torch.Tensor:
    """|mean matrix s_w at t_r - observed RF| over the given spatial points."""
    xyz = np.asarray(points, dtype=float)[:, :3]
    X = torch.as_tensor(np.column_stack([xyz, np.full(len(xyz), t_r)]), dtype=DTYPE)
    s, _ = nets.matrix(X, window(problem.matrix))
    return (s.mean() - observed).abs()


def loss_data_insitu(
    nets,
    points,
    values,
    problem: FlowProblem,
    n: int = 25000,
    rng: np.random.Generator | None = None,
) -> torch.Tensor:
    """MAE against a random subset of observed (x, y, z, t) saturations."""
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(points) == 0:
        raise ConfigurationError("no in-situ saturation observations")
    rng = rng if rng is not None else np.random.default_rng()
    if len(points) > n:
        idx = rng.choice(len(points), size=n, replace=False)
        points, values = points[idx], values[idx]
    s, _ = nets.matrix(torch.as_tensor(points, dtype=DTYPE), window(problem.matrix))
    return mae(s, torch.as_tensor(values, dtype=DTYPE))


def _inlet_velocity(state, X, f, fl) -> torch.Tensor:
    """Water Darcy velocity along +y at each row."""
    dp = gradient(state.p_w, X)[:, 1]
    return -f.permeability * state.krw / fl.mu_w * dp


def predicted_injection(
    nets,
    problem: FlowProblem,
    matrix_inlet,
    fracture_inlet,
    areas: tuple[float, float],
    times,
) -> torch.Tensor:
    """Water inflow rate (m³/s) at each time from inlet-face velocities.

    Raises:
        ConfigurationError: If the fracture area is positive with no fracture inlet points
    """
    a_m, a_f = areas
    matrix_inlet = np.asarray(matrix_inlet, dtype=float)[:, :3]
    fracture_inlet = np.empty((0, 3)) if fracture_inlet is None else np.asarray(fracture_inlet, dtype=float)[:, :3]
    if a_f > 0.0 and len(fracture_inlet) == 0:
        raise ConfigurationError("fracture inlet area is positive but there are no fracture inlet points")
    fl = problem.fluids
    rates = []
    for t in np.asarray(times, dtype=float):
        X = as_points(np.column_stack([matrix_inlet, np.full(len(matrix_inlet), t)]))
        q = a_m * _inlet_velocity(matrix_state(X, nets, problem), X, problem.matrix, fl).mean()
        if a_f > 0.0:
            Xf = as_points(np.column_stack([fracture_inlet, np.full(len(fracture_inlet), t)]))
            q = q + a_f * _inlet_velocity(fracture_state(Xf, nets, problem), Xf, problem.fracture, fl).mean()
        rates.append(q)
    return torch.stack(rates)


def loss_data_injection(
    nets,
    problem: FlowProblem,
    matrix_inlet,
    fracture_inlet,
    areas: tuple[float, float],
    times,
    observed,
) -> torch.Tensor:
    """MAE between predicted and observed inflow rate over the observation times."""
    pred = predicted_injection(nets, problem, matrix_inlet, fracture_inlet, areas, times)
    return mae(pred, torch.as_tensor(np.asarray(observed, dtype=float), dtype=DTYPE))


@dataclass(eq=False)
class LossBreakdown:
    """Named loss terms of one evaluation plus the weighted total."""

    terms: dict[str, torch.Tensor]
    total: torch.Tensor | None = None

    def __getitem__(self, key: str) -> torch.Tensor:
        return self.terms[key]

    def floats(self) -> dict[str, float]:
        out = {k: float(v.detach()) for k, v in self.terms.items()}
        if self.total is not None:
            out["L_t"] = float(self.total.detach())
        return out

    def dump(self) -> str:
        return ", ".join(f"{k}={v:.4g}" for k, v in self.floats().items())


def total_loss(
    breakdown: LossBreakdown,
    weights: Mapping[str, float] | None = None,
    tau: float = 0.0,
) -> torch.Tensor:
    """Weighted sum of every active loss term.

    Condition terms are thresholded at ``tau`` first. Weights default to 1.

    Raises:
        DivergenceError: If the total is not finite
    """
    weights = weights or {}
    unknown = set(weights) - set(LOSS_TERMS)
    if unknown:
        raise ConfigurationError(f"unknown loss weight keys: {sorted(unknown)}")

    total = torch.zeros((), dtype=DTYPE)
    for key in LOSS_TERMS:
        if key not in breakdown.terms:
            continue
        w = float(weights.get(key, 1.0))
        term = breakdown.terms[key]
        total = total + (threshold(term, tau, w) if key in CONDITION_TERMS else w * term)
    breakdown.total = total
    if not math.isfinite(float(total.detach())):
        raise DivergenceError(f"non-finite total loss: {breakdown.dump()}")
    return total
