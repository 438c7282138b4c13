"""Tests for conservation residuals, scaling constants and the transfer term."""

import numpy as np
import pytest
import torch

from fracflow.autodiff import DTYPE
from fracflow.geometry import Tag
from fracflow.pinn import (
    NonFiniteResidualError,
    kappa_constants,
    pretrain_targets,
    residual_fracture,
    residual_matrix,
    residual_matrix_fracture,
    transfer_term,
)
from fracflow.pinn.residuals import (
    as_points,
    check_finite,
    fracture_residuals,
    matrix_fracture_residuals,
    matrix_residuals,
    tangential_projector,
    window,
)
from tests.fixtures import benchmark_problem, small_collocation, small_networks


def test_kappa_constants():
    """kappa_p is the mean boundary pressure, kappa_r is t_max over the mean density."""
    problem = benchmark_problem()
    kappa_p, kappa_r = kappa_constants(problem)
    assert kappa_p == pytest.approx((problem.p_in + problem.p_out) / 2)
    assert kappa_r == pytest.approx(1.0e6 / 538.8)
    assert kappa_r == pytest.approx(1856.0, rel=1e-3)


def test_transfer_term_value():
    """Hand value of the normal-flux transfer."""
    assert transfer_term(2.0, 1.0, 0.5, 1.0, 1.0, 1.0, 0.5) == pytest.approx(-8.0)


def test_transfer_term_antisymmetric():
    """Swapping pressures flips the sign; equal pressures give no transfer."""
    args = (0.3, 1e-3, 1e-15, 1000.0, 1e-3)
    forward = transfer_term(3.2e6, 3.1e6, *args)
    assert transfer_term(3.1e6, 3.2e6, *args) == pytest.approx(-forward)
    assert transfer_term(3.2e6, 3.2e6, *args) == 0.0


def test_transfer_term_aperture_scaling():
    """The transfer grows with the inverse square of the aperture."""
    a = transfer_term(2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1e-3)
    b = transfer_term(2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2e-3)
    assert a / b == pytest.approx(4.0)


def test_residual_losses_finite():
    """Untrained networks give finite non-negative residual losses on every set."""
    problem = benchmark_problem()
    colloc = small_collocation(problem)
    nets = small_networks(problem)
    results = [
        residual_matrix(colloc[Tag.MATRIX], nets, problem),
        residual_matrix_fracture(colloc[Tag.MATRIX_FRACTURE], nets, problem),
        residual_fracture(colloc[Tag.FRACTURE], nets, problem, colloc.fractures.normals),
        residual_fracture(colloc[Tag.FRACTURE], nets, problem, coupled=False),
    ]
    for l_w, l_nw in results:
        assert torch.isfinite(l_w) and torch.isfinite(l_nw)
        assert float(l_w) >= 0.0 and float(l_nw) >= 0.0


def test_transfer_cancels_between_matrix_and_fracture():
    """What the matrix side loses to the fracture at a shared point, the fracture side gains."""
    problem = benchmark_problem()
    colloc = small_collocation(problem)
    nets = small_networks(problem)
    points = colloc[Tag.MATRIX_FRACTURE]

    plain = matrix_residuals(as_points(points), nets, problem)
    with_transfer = matrix_fracture_residuals(as_points(points), nets, problem)
    coupled = fracture_residuals(as_points(points), nets, problem, coupled=True)
    alone = fracture_residuals(as_points(points), nets, problem, coupled=False)

    for phase in range(2):
        matrix_side = (with_transfer[phase] - plain[phase]).detach()
        fracture_side = (coupled[phase] - alone[phase]).detach()
        scale = max(float(plain[phase].abs().max()), float(coupled[phase].abs().max()), 1.0)
        assert torch.allclose(matrix_side, -fracture_side, rtol=0.0, atol=1e-9 * scale)


def test_check_finite_names_point():
    """The error carries the first offending (x, y, z, t) row."""
    X = as_points([[0.0, 0.0, 0.0, 0.0], [1.0, 2.0, 3.0, 4.0]])
    r = torch.tensor([0.0, float("nan")], dtype=DTYPE)
    with pytest.raises(NonFiniteResidualError) as exc:
        check_finite(r, X, "test")
    assert exc.value.point == (1.0, 2.0, 3.0, 4.0)


def test_tangential_projector():
    """The projector removes the normal component and is None without normals."""
    assert tangential_projector(None, (0, 1)) is None
    P = tangential_projector(np.array([[1.0, 0.0, 0.0]]), (0, 1))
    g = torch.tensor([3.0, 5.0], dtype=DTYPE)
    assert torch.allclose(P[0] @ g, torch.tensor([0.0, 5.0], dtype=DTYPE))


def test_window():
    """The mobile window runs from s_wc to 1 - s_nwr."""
    assert window(benchmark_problem().matrix) == pytest.approx((0.0, 0.67))


def test_pretrain_targets():
    """Inlet rows are flooded, t = 0 rows are initial, pressure drops linearly."""
    problem = benchmark_problem()
    length = problem.geometry.length
    points = np.array([
        [0.004, 0.0, 0.0, 5.0e5],
        [0.004, length, 0.0, 0.0],
        [0.004, length / 2, 0.0, 0.0],
    ])
    targets = pretrain_targets(points, problem)
    assert targets.u_t > 0.0
    assert targets.s_w[0] == pytest.approx(1.0 - problem.fracture.corey.s_nwr)
    assert targets.s_w[1] == pytest.approx(problem.fracture.corey.s_wc)
    assert targets.p_nw[0] == pytest.approx(problem.p_in)
    assert targets.p_nw[1] == pytest.approx(problem.p_out)
    assert targets.p_nw[2] == pytest.approx((problem.p_in + problem.p_out) / 2)


def test_pretrain_targets_disconnected():
    """Rows of fractures that miss the inlet keep the initial state."""
    problem = benchmark_problem()
    points = np.array([[0.004, 0.0, 0.0, 5.0e5], [0.004, 0.0, 0.0, 5.0e5]])
    targets = pretrain_targets(points, problem, connected=[True, False])
    assert targets.s_w[1] == pytest.approx(problem.fracture.corey.s_wc)
    assert targets.p_nw[1] == pytest.approx(problem.p_i)
    assert targets.s_w[0] > targets.s_w[1]
