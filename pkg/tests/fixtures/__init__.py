"""Small problems and collocation sets shared across the test suite."""

from pathlib import Path

from fracflow.closure import (
    CP_TO_PA_S,
    MD_TO_M2,
    PSI_TO_PA,
    CoreyParams,
    FluidProps,
    LeverettParams,
    SaturationFunctions,
    fracture_closure,
)
from fracflow.geometry import (
    CoreGeometry,
    FractureSet,
    PlanarFracture,
    Shape,
    TemporalSampler,
    build_collocation,
    planar_fracture,
)
from fracflow.problem import FlowProblem

FIXTURES_DIR = Path(__file__).parent

LENGTH = 0.058
RADIUS = 0.0125


def benchmark_corey(**overrides) -> CoreyParams:
    """Corey parameters of the synthetic benchmark."""
    values = dict(krw_max=0.20, krnw_max=0.20, n_w1=1.5, n_w2=1.5, n_nw1=2.0, n_nw2=2.0, s_wc=0.0, s_nwr=0.33)
    values.update(overrides)
    return CoreyParams(**values)


def benchmark_leverett(**overrides) -> LeverettParams:
    values = dict(J1=0.02, J2=0.01, sigma=0.04)
    values.update(overrides)
    return LeverettParams(**values)


def benchmark_fluids() -> FluidProps:
    return FluidProps(mu_w=0.89 * CP_TO_PA_S, mu_nw=0.0157 * CP_TO_PA_S, rho_w=998.7, rho_nw=78.9)


def benchmark_matrix(**corey) -> SaturationFunctions:
    return SaturationFunctions(
        corey=benchmark_corey(**corey),
        leverett=benchmark_leverett(),
        porosity=0.10,
        permeability=0.000199 * MD_TO_M2,
    )


def slab_geometry() -> CoreGeometry:
    return CoreGeometry(length=LENGTH, radius=RADIUS, shape=Shape.SLAB, depth=0.01)


def cylinder_geometry() -> CoreGeometry:
    return CoreGeometry(length=LENGTH, radius=RADIUS)


def axial_fracture(geom: CoreGeometry, x: float = 0.004, spacing: float = 1e-3) -> FractureSet:
    """One fracture parallel to the flow, touching both end faces."""
    plane = PlanarFracture(origin=(x, LENGTH / 2.0, 0.0), normal=(1.0, 0.0, 0.0), extent=(LENGTH, 0.01))
    return FractureSet(fractures=(planar_fracture(geom, plane, spacing),), aperture=1e-3, spacing=spacing)


def benchmark_problem(geom: CoreGeometry | None = None, with_fracture: bool = True, t_max: float = 1.0e6) -> FlowProblem:
    """The synthetic benchmark problem on a slab with one axial fracture."""
    geom = geom or slab_geometry()
    matrix = benchmark_matrix()
    fractures = axial_fracture(geom) if with_fracture else FractureSet()
    return FlowProblem(
        geometry=geom,
        fluids=benchmark_fluids(),
        matrix=matrix,
        fracture=fracture_closure(matrix, 0.0199 * MD_TO_M2, 0.10),
        fractures=fractures,
        p_in=530 * PSI_TO_PA,
        p_out=460 * PSI_TO_PA,
        p_i=460 * PSI_TO_PA,
        t_max=t_max,
    )


def small_collocation(problem: FlowProblem, resolution=(8, 12, 1), seed: int = 0):
    """A coarse collocation set for fast training tests."""
    sampler = TemporalSampler(t_min=1.0, t_max=problem.t_max, count=20)
    return build_collocation(
        problem.geometry,
        problem.fractures,
        sampler,
        resolution=resolution,
        exclusion=5e-4,
        n_face=10,
        n_radial=10,
        seed=seed,
    )


def small_networks(problem: FlowProblem, seed: int = 0, fourier_saturation: bool = False):
    """A NetworkSet small enough for tests to run in seconds."""
    from fracflow.network import MLPConfig
    from fracflow.pinn import networks_for

    return networks_for(
        problem,
        matrix_cfg=MLPConfig(width=12, depth=2),
        fracture_cfg=MLPConfig(width=12, depth=2),
        weight_cfg=MLPConfig(width=6, depth=1, adaptive=False),
        fourier_saturation=fourier_saturation,
        seed=seed,
    )
