"""Network predictions on lattices and time series, without gradients."""

import numpy as np
import torch

from fracflow.autodiff import DTYPE
from fracflow.pinn.residuals import window
from fracflow.problem import FlowProblem


def _lattice(problem: FlowProblem, resolution: tuple[int, int, int]) -> tuple[tuple[int, int, int], np.ndarray, np.ndarray]:
    geom = problem.geometry
    xs, ys, zs = geom.lattice_axes(resolution)
    shape = (len(xs), len(ys), len(zs))
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    xyz = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    return shape, xyz, geom.inside(xyz)


def predict_fields(nets, problem: FlowProblem, resolution: tuple[int, int, int], t: float) -> tuple[np.ndarray, np.ndarray]:
    """Matrix s_w and p_nw on the cell-centred lattice at time ``t``; NaN outside the core."""
    shape, xyz, inside = _lattice(problem, resolution)
    X = torch.as_tensor(np.column_stack([xyz[inside], np.full(int(inside.sum()), t)]), dtype=DTYPE)
    with torch.no_grad():
        s, p = nets.matrix(X, window(problem.matrix))
    sw = np.full(len(xyz), np.nan)
    pn = np.full(len(xyz), np.nan)
    sw[inside] = s.numpy()
    pn[inside] = p.numpy()
    return sw.reshape(shape), pn.reshape(shape)


def predict_rf(nets, problem: FlowProblem, points, times) -> np.ndarray:
    """Mean matrix s_w over the spatial points at each time."""
    xyz = np.asarray(points, dtype=float)[:, :3]
    out = []
    with torch.no_grad():
        for t in np.asarray(times, dtype=float):
            X = torch.as_tensor(np.column_stack([xyz, np.full(len(xyz), t)]), dtype=DTYPE)
            s, _ = nets.matrix(X, window(problem.matrix))
            out.append(float(s.mean()))
    return np.asarray(out)
