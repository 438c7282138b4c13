"""Tests for closure parameter validation and the fracture closure."""

import pytest

from fracflow.closure import (
    CoreyParams,
    FluidProps,
    InvalidParameterError,
    LeverettParams,
    SaturationFunctions,
    fracture_closure,
    rel_perm,
    validate_corey,
    validate_fluids,
    validate_leverett,
    validate_saturation_functions,
)
from tests.fixtures import benchmark_corey, benchmark_leverett, benchmark_matrix


def test_benchmark_parameters_are_valid():
    """The benchmark closure should pass validation."""
    validate_saturation_functions(benchmark_matrix())


@pytest.mark.parametrize("field, value", [
    ("krw_max", 0.0),
    ("krnw_max", 1.5),
    ("n_w1", 0.0),
    ("n_nw2", -1.0),
    ("s_wc", 1.0),
    ("s_nwr", -0.1),
])
def test_validate_corey_rejects_out_of_range(field, value):
    """Each Corey field has its own valid range."""
    with pytest.raises(InvalidParameterError, match=field):
        validate_corey(benchmark_corey(**{field: value}))


def test_validate_corey_rejects_closed_window():
    """s_wc + s_nwr must leave a mobile window."""
    with pytest.raises(InvalidParameterError, match="s_wc \\+ s_nwr"):
        validate_corey(benchmark_corey(s_wc=0.5, s_nwr=0.5))


def test_validate_leverett():
    """J magnitudes must be non-negative and sigma positive."""
    validate_leverett(benchmark_leverett(J1=0.0, J2=0.0))
    with pytest.raises(InvalidParameterError):
        validate_leverett(benchmark_leverett(J1=-0.1))
    with pytest.raises(InvalidParameterError):
        validate_leverett(benchmark_leverett(sigma=0.0))
    with pytest.raises(InvalidParameterError):
        validate_leverett(LeverettParams(J1=0.02, J2=0.01, sigma=0.04, S_eq=1.0))


def test_validate_fluids():
    """Every fluid property must be positive."""
    with pytest.raises(InvalidParameterError, match="rho_nw"):
        validate_fluids(FluidProps(mu_w=1e-3, mu_nw=1e-5, rho_w=1000.0, rho_nw=0.0))


def test_validate_saturation_functions_rock():
    """Porosity must lie in (0, 1) and permeability be positive."""
    f = benchmark_matrix()
    with pytest.raises(InvalidParameterError, match="porosity"):
        validate_saturation_functions(SaturationFunctions(f.corey, f.leverett, 1.0, f.permeability))
    with pytest.raises(InvalidParameterError, match="permeability"):
        validate_saturation_functions(SaturationFunctions(f.corey, f.leverett, 0.1, 0.0))


def test_s_max():
    """s_max is the highest mobile water saturation."""
    assert benchmark_corey().s_max == pytest.approx(0.67)


def test_mu_m_is_geometric_mean():
    """mu_m should be the geometric mean viscosity."""
    fl = FluidProps(mu_w=4e-3, mu_nw=1e-3, rho_w=1000.0, rho_nw=100.0)
    assert fl.mu_m == pytest.approx(2e-3)


def test_fracture_closure_is_linear_with_faint_pc():
    """Fracture kr is linear with unit endpoints and its sigma is scaled down."""
    matrix = benchmark_matrix()
    f = fracture_closure(matrix, permeability=1e-14, porosity=0.1, pc_scale=1e-3)
    validate_saturation_functions(f)
    krw, krnw = rel_perm(0.3, f.corey)
    assert krw == pytest.approx(0.3)
    assert krnw == pytest.approx(0.7)
    assert f.leverett.sigma == pytest.approx(matrix.leverett.sigma * 1e-3)
    assert f.leverett.J1 == matrix.leverett.J1
    assert isinstance(f.corey, CoreyParams)
