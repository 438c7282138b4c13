"""Tests for saturation functions and the CDC curve."""

import math

import numpy as np
import pytest
import torch
from scipy.integrate import trapezoid

from fracflow.closure import (
    SATURATION_EPS,
    CoreyParams,
    FluidProps,
    InvalidParameterError,
    LeverettParams,
    SaturationFunctions,
    SingularEvaluationError,
    capillary_pressure,
    cdc_lambda,
    clamp_open,
    dj_dsw,
    fractional_flow,
    lambda_area,
    leverett_j,
    normalized_saturation,
    physical_saturation,
    rel_perm,
    saturation_grid,
)
from tests.fixtures import benchmark_corey, benchmark_fluids, benchmark_leverett, benchmark_matrix


def test_normalized_saturation_endpoints():
    """normalized_saturation should map s_wc to 0 and 1 - s_nwr to 1."""
    assert normalized_saturation(0.1, 0.1, 0.33) == 0.0
    assert normalized_saturation(0.67, 0.0, 0.33) == pytest.approx(1.0, rel=1e-12)


def test_normalized_saturation_midpoint():
    """normalized_saturation should scale into the mobile window."""
    assert normalized_saturation(0.335, 0.0, 0.33) == pytest.approx(0.5, rel=1e-12)


def test_normalized_saturation_clamps_outside_window():
    """Saturations outside the mobile window clamp to [0, 1]."""
    out = normalized_saturation(np.array([0.0, 0.9]), 0.1, 0.33)
    np.testing.assert_array_equal(out, [0.0, 1.0])


def test_normalized_saturation_degenerate_window():
    """A closed mobile window is an invalid parameter."""
    with pytest.raises(InvalidParameterError):
        normalized_saturation(0.5, 0.6, 0.4)


def test_physical_saturation_inverts_normalization():
    """physical_saturation should undo normalized_saturation inside the window."""
    sw = np.linspace(0.1, 0.6, 11)
    S = normalized_saturation(sw, 0.1, 0.33)
    np.testing.assert_allclose(physical_saturation(S, 0.1, 0.33), sw, rtol=1e-12)


def test_rel_perm_endpoints():
    """kr endpoints should equal the Corey maxima."""
    p = benchmark_corey()
    krw, krnw = rel_perm(1.0, p)
    assert krw == pytest.approx(0.20, rel=1e-12)
    assert krnw == 0.0
    krw, krnw = rel_perm(0.0, p)
    assert krw == 0.0
    assert krnw == pytest.approx(0.20, rel=1e-12)


def test_rel_perm_hand_value():
    """krw at S=0.5 with exponent 1.5 should be 0.2 * 0.5^1.5."""
    krw, _ = rel_perm(0.5, benchmark_corey())
    assert krw == pytest.approx(0.2 * 0.5 ** 1.5, rel=1e-12)
    assert krw == pytest.approx(0.0707107, rel=1e-6)


def test_rel_perm_variable_exponent():
    """The exponent interpolates linearly between its two limits."""
    p = benchmark_corey(n_w1=3.0, n_w2=1.0)
    krw, _ = rel_perm(0.25, p)
    assert krw == pytest.approx(0.2 * 0.25 ** (3.0 * 0.25 + 1.0 * 0.75), rel=1e-12)


def test_rel_perm_monotone():
    """krw rises and krnw falls over the whole window."""
    S = np.linspace(0.0, 1.0, 1001)
    krw, krnw = rel_perm(S, benchmark_corey(n_w1=3.0, n_w2=1.2, n_nw1=1.1, n_nw2=4.0))
    assert np.all(np.diff(krw) >= 0.0)
    assert np.all(np.diff(krnw) <= 0.0)


def test_leverett_j_zero_at_equilibrium():
    """J should vanish at S_eq."""
    p = LeverettParams(J1=0.02, J2=0.01, sigma=0.04, S_eq=0.5)
    assert leverett_j(0.5, p) == pytest.approx(0.0, abs=1e-15)


def test_leverett_j_hand_value():
    """J at S=0.25 should be 0.02 ln 2 + 0.01 ln 1.5."""
    p = LeverettParams(J1=0.02, J2=0.01, sigma=0.04, S_eq=0.5)
    expected = 0.02 * math.log(2.0) + 0.01 * math.log(1.5)
    assert leverett_j(0.25, p) == pytest.approx(expected, rel=1e-12)
    assert leverett_j(0.25, p) == pytest.approx(0.0179173, rel=1e-5)


def test_leverett_j_zero_parameters():
    """J1 = J2 = 0 gives a flat zero curve."""
    p = LeverettParams(J1=0.0, J2=0.0, sigma=0.04)
    np.testing.assert_array_equal(leverett_j(saturation_grid(11), p), np.zeros(11))


def test_leverett_j_rejects_endpoints():
    """Evaluating J at 0 or 1 is a singular evaluation."""
    p = benchmark_leverett()
    with pytest.raises(SingularEvaluationError):
        leverett_j(np.array([0.0, 0.5]), p)
    with pytest.raises(SingularEvaluationError):
        leverett_j(torch.tensor([1.0]), p)


def test_leverett_j_strictly_decreasing_with_sign():
    """J decreases in S and is positive below S_eq, negative above."""
    p = LeverettParams(J1=0.02, J2=0.01, sigma=0.04, S_eq=0.4)
    S = saturation_grid(1001)
    J = leverett_j(S, p)
    assert np.all(np.diff(J) < 0.0)
    assert np.all(np.sign(J[S < 0.399]) > 0)
    assert np.all(np.sign(J[S > 0.401]) < 0)


def test_dj_dsw_matches_central_difference():
    """Analytic dJ/dS should match central differences on interior points."""
    p = LeverettParams(J1=0.02, J2=0.01, sigma=0.04, S_eq=0.5)
    S = np.linspace(0.05, 0.95, 91)
    h = 1e-6
    numeric = (leverett_j(S + h, p) - leverett_j(S - h, p)) / (2.0 * h)
    np.testing.assert_allclose(dj_dsw(S, p), numeric, rtol=1e-7)


def test_capillary_pressure_hand_value():
    """pc should follow sigma sqrt(phi/K) J for the benchmark rock."""
    f = benchmark_matrix()
    f = SaturationFunctions(
        corey=f.corey,
        leverett=LeverettParams(J1=0.02, J2=0.01, sigma=0.04, S_eq=0.5),
        porosity=f.porosity,
        permeability=f.permeability,
    )
    J = leverett_j(0.25, f.leverett)
    expected = 0.04 * math.sqrt(0.1 / f.permeability) * J
    assert capillary_pressure(0.25, f) == pytest.approx(expected, rel=1e-12)
    assert capillary_pressure(0.25, f) == pytest.approx(5.11e5, rel=5e-3)


def test_capillary_pressure_linear_in_sigma():
    """Doubling sigma doubles pc."""
    f = benchmark_matrix()
    g = SaturationFunctions(
        corey=f.corey,
        leverett=LeverettParams(J1=0.02, J2=0.01, sigma=0.08),
        porosity=f.porosity,
        permeability=f.permeability,
    )
    assert capillary_pressure(0.3, g) == pytest.approx(2.0 * capillary_pressure(0.3, f), rel=1e-12)


def test_fractional_flow_endpoints():
    """f_w should be 0 at S=0 and 1 at S=1."""
    f, fl = benchmark_matrix(), benchmark_fluids()
    assert fractional_flow(0.0, f, fl) == 0.0
    assert fractional_flow(1.0, f, fl) == 1.0


def test_fractional_flow_symmetric_case():
    """Equal kr and viscosities give f_w = 0.5 at S = 0.5."""
    f = SaturationFunctions(
        corey=CoreyParams(krw_max=0.5, krnw_max=0.5, n_w1=2.0, n_w2=2.0, n_nw1=2.0, n_nw2=2.0),
        leverett=benchmark_leverett(),
        porosity=0.1,
        permeability=1e-15,
    )
    fl = FluidProps(mu_w=1e-3, mu_nw=1e-3, rho_w=1000.0, rho_nw=1000.0)
    assert fractional_flow(0.5, f, fl) == pytest.approx(0.5, rel=1e-12)


def test_fractional_flow_mobility_ratio():
    """f_w should equal the mobility ratio for the benchmark at S=0.5."""
    f, fl = benchmark_matrix(), benchmark_fluids()
    krw, krnw = 0.2 * 0.5 ** 1.5, 0.2 * 0.5 ** 2.0
    lw, lnw = krw / 0.89e-3, krnw / 0.0157e-3
    assert fractional_flow(0.5, f, fl) == pytest.approx(lw / (lw + lnw), rel=1e-12)


def test_fractional_flow_bounded_and_monotone():
    """f_w stays in [0, 1] and does not decrease."""
    S = np.linspace(0.0, 1.0, 1001)
    fw = fractional_flow(S, benchmark_matrix(), benchmark_fluids())
    assert np.all((fw >= 0.0) & (fw <= 1.0))
    assert np.all(np.diff(fw) >= -1e-15)


def test_fractional_flow_tensor():
    """fractional_flow should accept tensors and return a tensor."""
    S = torch.tensor([0.0, 0.5, 1.0], dtype=torch.float64)
    fw = fractional_flow(S, benchmark_matrix(), benchmark_fluids())
    assert isinstance(fw, torch.Tensor)
    assert fw[0].item() == 0.0
    assert fw[2].item() == 1.0


def test_cdc_lambda_hand_value():
    """Lambda at S=0.5 should chain kr, f_w and the analytic J slope."""
    f, fl = benchmark_matrix(), benchmark_fluids()
    krw, krnw = 0.2 * 0.5 ** 1.5, 0.2 * 0.5 ** 2.0
    lw, lnw = krw / fl.mu_w, krnw / fl.mu_nw
    fw = lw / (lw + lnw)
    slope = -0.02 / 0.5 - 0.01 / 0.5
    expected = math.sqrt(fl.mu_w * fl.mu_nw) * lnw * fw * (-slope)
    assert cdc_lambda(0.5, f, fl) == pytest.approx(expected, rel=1e-12)


def test_cdc_lambda_nonnegative_and_vanishes_at_ends():
    """Lambda is non-negative and near zero at the clamped endpoints."""
    S = saturation_grid(1001)
    lam = cdc_lambda(S, benchmark_matrix(), benchmark_fluids())
    assert np.all(lam >= 0.0)
    assert lam[0] < 1e-2 * lam.max()
    assert lam[-1] < 1e-2 * lam.max()


def test_lambda_area_zero_for_flat_j():
    """A flat J curve gives zero area."""
    f = benchmark_matrix()
    f = SaturationFunctions(
        corey=f.corey,
        leverett=LeverettParams(J1=0.0, J2=0.0, sigma=0.04),
        porosity=f.porosity,
        permeability=f.permeability,
    )
    assert lambda_area(f, benchmark_fluids()) == 0.0


def test_lambda_area_linear_in_j_magnitude():
    """Scaling J1 and J2 by c scales the area by c."""
    f, fl = benchmark_matrix(), benchmark_fluids()
    g = SaturationFunctions(
        corey=f.corey,
        leverett=LeverettParams(J1=0.06, J2=0.03, sigma=0.04),
        porosity=f.porosity,
        permeability=f.permeability,
    )
    assert lambda_area(g, fl) == pytest.approx(3.0 * lambda_area(f, fl), rel=1e-12)


def test_lambda_area_viscosity_ratio_only():
    """Scaling both viscosities together leaves the curve unchanged."""
    f, fl = benchmark_matrix(), benchmark_fluids()
    scaled = FluidProps(mu_w=4.0 * fl.mu_w, mu_nw=4.0 * fl.mu_nw, rho_w=fl.rho_w, rho_nw=fl.rho_nw)
    assert lambda_area(f, scaled) == pytest.approx(lambda_area(f, fl), rel=1e-12)


def test_lambda_area_matches_fine_quadrature():
    """The trapezoid area should agree with a ten times finer grid."""
    f, fl = benchmark_matrix(), benchmark_fluids()
    S = saturation_grid(100001)
    fine = trapezoid(cdc_lambda(S, f, fl), S)
    assert lambda_area(f, fl, n=10001) == pytest.approx(fine, rel=1e-5)


def test_lambda_area_rejects_tiny_grid():
    """A grid needs at least two points."""
    with pytest.raises(InvalidParameterError):
        lambda_area(benchmark_matrix(), benchmark_fluids(), n=1)


def test_clamp_open_bounds():
    """clamp_open keeps saturations off the endpoints."""
    out = clamp_open(np.array([0.0, 0.5, 1.0]))
    np.testing.assert_array_equal(out, [SATURATION_EPS, 0.5, 1.0 - SATURATION_EPS])


def test_closure_accepts_tensor_parameters():
    """Trainable tensor parameters flow gradients through kr."""
    k = torch.tensor(0.2, dtype=torch.float64, requires_grad=True)
    p = CoreyParams(krw_max=k, krnw_max=0.2, n_w1=1.5, n_w2=1.5, n_nw1=2.0, n_nw2=2.0)
    krw, _ = rel_perm(torch.tensor([0.5], dtype=torch.float64), p)
    krw.sum().backward()
    assert k.grad.item() == pytest.approx(0.5 ** 1.5, rel=1e-12)
