"""Experiment files: TOML with explicit units, parsed into frozen dataclasses."""

import hashlib
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

from fracflow.closure import (
    BAR_TO_PA,
    CP_TO_PA_S,
    MD_TO_M2,
    PSI_TO_PA,
    CoreyParams,
    FluidProps,
    LeverettParams,
    SaturationFunctions,
    fracture_closure,
)
from fracflow.exceptions import ConfigurationError, FracFlowError
from fracflow.fdsim import NelderMeadOptions, SimSchedule
from fracflow.geometry import (
    DEFAULT_EXCLUSION,
    DEFAULT_RESOLUTION,
    CollocationSet,
    CoreGeometry,
    FractureSet,
    PlanarFracture,
    Shape,
    Spacing,
    TemporalSampler,
    build_collocation,
    load_fracture_csv,
    planar_fracture,
)
from fracflow.io import ObservationBundle, load_observations
from fracflow.network import FRACTURE_CONFIG, MATRIX_CONFIG, WEIGHT_CONFIG, MLPConfig, NetworkSet
from fracflow.pinn import TrainConfig, networks_for
from fracflow.problem import FlowProblem

logger = logging.getLogger(__name__)

PRESSURE_UNITS = {"Pa": 1.0, "psi": PSI_TO_PA, "bar": BAR_TO_PA}
LENGTH_UNITS = {"m": 1.0, "cm": 1e-2, "mm": 1e-3}
TIME_UNITS = {"s": 1.0, "min": 60.0, "h": 3600.0}
PERMEABILITY_UNITS = {"m2": 1.0, "mD": MD_TO_M2}
VISCOSITY_UNITS = {"Pa_s": 1.0, "cP": CP_TO_PA_S}
DENSITY_UNITS = {"kg_m3": 1.0}
TENSION_UNITS = {"N_m": 1.0}
RATE_UNITS = {"m3_per_s": 1.0}

_REQUIRED = object()


def _kind_name(kind) -> str:
    return getattr(kind, "__name__", str(kind))


def _coerce(value: Any, kind, where: str):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigurationError(f"{where}: expected true or false, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"{where}: expected a string, got {value!r}")
        return value
    if callable(kind):
        return kind(value, where)
    raise TypeError(f"unsupported kind {_kind_name(kind)}")


def float_list(n: int | None = None) -> Callable[[Any, str], tuple[float, ...]]:
    """Coercer for an array of numbers, optionally of fixed length."""
    def coerce(value, where):
        if not isinstance(value, list):
            raise ConfigurationError(f"{where}: expected an array, got {value!r}")
        if n is not None and len(value) != n:
            raise ConfigurationError(f"{where}: expected {n} values, got {len(value)}")
        return tuple(_coerce(v, float, f"{where}[{i}]") for i, v in enumerate(value))
    return coerce


def int_list(n: int) -> Callable[[Any, str], tuple[int, ...]]:
    def coerce(value, where):
        if not isinstance(value, list) or len(value) != n:
            raise ConfigurationError(f"{where}: expected an array of {n} integers, got {value!r}")
        return tuple(_coerce(v, int, f"{where}[{i}]") for i, v in enumerate(value))
    return coerce


def str_list(value, where) -> tuple[str, ...]:
    if not isinstance(value, list):
        raise ConfigurationError(f"{where}: expected an array of strings, got {value!r}")
    return tuple(_coerce(v, str, f"{where}[{i}]") for i, v in enumerate(value))


class _Table:
    """A TOML table that remembers which keys were read, for unknown-key checks."""

    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path or 'config'}: expected a table")
        self.data = data
        self.path = path
        self.used: set[str] = set()

    def where(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def has(self, key: str) -> bool:
        return key in self.data

    def get(self, key: str, kind=float, default=_REQUIRED):
        if key not in self.data:
            if default is _REQUIRED:
                raise ConfigurationError(f"missing required key '{self.where(key)}'")
            return default
        self.used.add(key)
        return _coerce(self.data[key], kind, self.where(key))

    def quantity(self, name: str, units: dict[str, float], default=_REQUIRED) -> float:
        """A number written as ``<name>_<unit>``, converted to SI."""
        given = [u for u in units if f"{name}_{u}" in self.data]
        if len(given) > 1:
            keys = ", ".join(self.where(f"{name}_{u}") for u in given)
            raise ConfigurationError(f"{keys}: give one unit only")
        if not given:
            if default is _REQUIRED:
                options = "/".join(f"{name}_{u}" for u in units)
                raise ConfigurationError(f"missing required key '{self.where(options)}'")
            return default
        unit = given[0]
        return self.get(f"{name}_{unit}", float) * units[unit]

    def quantity_list(self, name: str, units: dict[str, float], default=_REQUIRED) -> tuple[float, ...]:
        given = [u for u in units if f"{name}_{u}" in self.data]
        if len(given) > 1:
            raise ConfigurationError(f"{self.where(name)}: give one unit only")
        if not given:
            if default is _REQUIRED:
                raise ConfigurationError(f"missing required key '{self.where(name + '_' + next(iter(units)))}'")
            return default
        unit = given[0]
        return tuple(v * units[unit] for v in self.get(f"{name}_{unit}", float_list()))

    def table(self, key: str, required: bool = False) -> "_Table":
        if key not in self.data:
            if required:
                raise ConfigurationError(f"missing required table '[{self.where(key)}]'")
            return _Table({}, self.where(key))
        self.used.add(key)
        return _Table(self.data[key], self.where(key))

    def tables(self, key: str) -> list["_Table"]:
        if key not in self.data:
            return []
        self.used.add(key)
        items = self.data[key]
        if not isinstance(items, list):
            raise ConfigurationError(f"{self.where(key)}: expected an array of tables")
        return [_Table(item, f"{self.where(key)}[{i}]") for i, item in enumerate(items)]

    def finish(self) -> None:
        unknown = sorted(set(self.data) - self.used)
        if unknown:
            raise ConfigurationError(f"unknown key '{self.where(unknown[0])}'")


@dataclass(frozen=True)
class FractureConfig:
    """Fracture clouds (planes and/or a point file) and fracture rock properties."""

    aperture: float = 1e-3
    permeability: float = 1e-11
    porosity: float = 0.9
    pc_scale: float = 1e-3
    spacing: float | None = None
    planes: tuple[PlanarFracture, ...] = ()
    file: Path | None = None


@dataclass(frozen=True)
class ProblemConfig:
    """Geometry, fluids, matrix rock and boundary/initial data in SI units."""

    shape: Shape
    length: float
    radius: float
    depth: float
    fluids: FluidProps
    porosity: float
    permeability: float
    p_in: float
    p_out: float
    p_i: float
    t_max: float
    s_wi: float | None = None
    fractures: FractureConfig = field(default_factory=FractureConfig)


@dataclass(frozen=True)
class ClosureConfig:
    corey: CoreyParams
    leverett: LeverettParams


@dataclass(frozen=True)
class NetworkConfig:
    matrix: MLPConfig = MATRIX_CONFIG
    fracture: MLPConfig = FRACTURE_CONFIG
    weight: MLPConfig = WEIGHT_CONFIG
    fourier_saturation: bool = True


@dataclass(frozen=True)
class CollocationConfig:
    resolution: tuple[int, int, int] = DEFAULT_RESOLUTION
    exclusion: float = DEFAULT_EXCLUSION
    n_face: int = 500
    n_radial: int = 500
    t_min: float = 1.0
    time_count: int = 100
    spacing: Spacing = Spacing.RANDOM_SQRT


@dataclass(frozen=True)
class FDConfig:
    resolution: tuple[int, int, int] = (20, 40, 20)
    schedule: SimSchedule | None = None
    histmatch: NelderMeadOptions = field(default_factory=lambda: NelderMeadOptions(max_iter=200))


@dataclass(frozen=True)
class ObservationConfig:
    """Observation file paths, resolved against the config file's directory."""

    rf: Path | None = None
    rate: Path | None = None
    voxels: tuple[Path, ...] = ()

    @property
    def is_empty(self) -> bool:
        return self.rf is None and self.rate is None and not self.voxels


@dataclass(frozen=True)
class EnsembleConfig:
    n_seeds: int = 5
    max_workers: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully specified experiment, plus the hash of the file it came from."""

    problem: ProblemConfig
    closure: ClosureConfig
    network: NetworkConfig
    collocation: CollocationConfig
    training: TrainConfig
    fd: FDConfig
    observations: ObservationConfig
    ensemble: EnsembleConfig
    seed: int = 0
    source: Path | None = None
    sha256: str = ""


def _parse_fractures(t: _Table, base: Path) -> FractureConfig:
    planes = []
    for pt in t.tables("planes"):
        planes.append(PlanarFracture(
            origin=pt.quantity_list("origin", LENGTH_UNITS),
            normal=pt.get("normal", float_list(3)),
            extent=pt.quantity_list("extent", LENGTH_UNITS),
        ))
        if len(planes[-1].origin) != 3 or len(planes[-1].extent) != 2:
            raise ConfigurationError(f"{pt.path}: origin needs 3 values and extent 2")
        pt.finish()
    file = t.get("file", str, None)
    cfg = FractureConfig(
        aperture=t.quantity("aperture", LENGTH_UNITS, 1e-3),
        permeability=t.quantity("permeability", PERMEABILITY_UNITS, 1e-11),
        porosity=t.get("porosity", float, 0.9),
        pc_scale=t.get("pc_scale", float, 1e-3),
        spacing=t.quantity("spacing", LENGTH_UNITS, None),
        planes=tuple(planes),
        file=(base / file) if file else None,
    )
    t.finish()
    return cfg


def _parse_problem(t: _Table, base: Path) -> ProblemConfig:
    shape_name = t.get("shape", str, Shape.CYLINDER.value)
    try:
        shape = Shape(shape_name)
    except ValueError:
        raise ConfigurationError(f"{t.where('shape')}: expected 'cylinder' or 'slab', got {shape_name!r}") from None

    ft = t.table("fluids", required=True)
    fluids = FluidProps(
        mu_w=ft.quantity("mu_w", VISCOSITY_UNITS),
        mu_nw=ft.quantity("mu_nw", VISCOSITY_UNITS),
        rho_w=ft.quantity("rho_w", DENSITY_UNITS),
        rho_nw=ft.quantity("rho_nw", DENSITY_UNITS),
    )
    ft.finish()
    rt = t.table("rock", required=True)
    porosity = rt.get("porosity", float)
    permeability = rt.quantity("permeability", PERMEABILITY_UNITS)
    rt.finish()

    p_out = t.quantity("p_out", PRESSURE_UNITS)
    cfg = ProblemConfig(
        shape=shape,
        length=t.quantity("length", LENGTH_UNITS),
        radius=t.quantity("radius", LENGTH_UNITS),
        depth=t.quantity("depth", LENGTH_UNITS, 1.0),
        fluids=fluids,
        porosity=porosity,
        permeability=permeability,
        p_in=t.quantity("p_in", PRESSURE_UNITS),
        p_out=p_out,
        p_i=t.quantity("p_i", PRESSURE_UNITS, p_out),
        t_max=t.quantity("t_max", TIME_UNITS),
        s_wi=t.get("s_wi", float, None),
        fractures=_parse_fractures(t.table("fractures"), base),
    )
    t.finish()
    return cfg


def _parse_closure(t: _Table) -> ClosureConfig:
    ct = t.table("corey", required=True)
    corey = CoreyParams(
        krw_max=ct.get("krw_max"),
        krnw_max=ct.get("krnw_max"),
        n_w1=ct.get("n_w1"),
        n_w2=ct.get("n_w2"),
        n_nw1=ct.get("n_nw1"),
        n_nw2=ct.get("n_nw2"),
        s_wc=ct.get("s_wc", float, 0.0),
        s_nwr=ct.get("s_nwr", float, 0.0),
    )
    ct.finish()
    lt = t.table("leverett", required=True)
    leverett = LeverettParams(J1=lt.get("J1"), J2=lt.get("J2"), sigma=lt.quantity("sigma", TENSION_UNITS))
    if lt.has("S_eq"):
        leverett = LeverettParams(J1=leverett.J1, J2=leverett.J2, sigma=leverett.sigma, S_eq=lt.get("S_eq"))
    lt.finish()
    t.finish()
    return ClosureConfig(corey=corey, leverett=leverett)


def _parse_mlp(t: _Table, prefix: str, default: MLPConfig) -> MLPConfig:
    return MLPConfig(
        width=t.get(f"{prefix}_width", int, default.width),
        depth=t.get(f"{prefix}_depth", int, default.depth),
        adaptive=t.get(f"{prefix}_adaptive", bool, default.adaptive),
    )


def _parse_network(t: _Table) -> NetworkConfig:
    cfg = NetworkConfig(
        matrix=_parse_mlp(t, "matrix", MATRIX_CONFIG),
        fracture=_parse_mlp(t, "fracture", FRACTURE_CONFIG),
        weight=_parse_mlp(t, "weight", WEIGHT_CONFIG),
        fourier_saturation=t.get("fourier_saturation", bool, True),
    )
    t.finish()
    return cfg


def _parse_collocation(t: _Table) -> CollocationConfig:
    spacing = t.get("time_spacing", str, Spacing.RANDOM_SQRT.value)
    try:
        spacing = Spacing(spacing)
    except ValueError:
        raise ConfigurationError(f"{t.where('time_spacing')}: unknown spacing {spacing!r}") from None
    cfg = CollocationConfig(
        resolution=t.get("resolution", int_list(3), DEFAULT_RESOLUTION),
        exclusion=t.quantity("exclusion", LENGTH_UNITS, DEFAULT_EXCLUSION),
        n_face=t.get("n_face", int, 500),
        n_radial=t.get("n_radial", int, 500),
        t_min=t.quantity("t_min", TIME_UNITS, 1.0),
        time_count=t.get("time_count", int, 100),
        spacing=spacing,
    )
    t.finish()
    return cfg


def _parse_training(t: _Table, seed: int) -> TrainConfig:
    defaults = TrainConfig()
    wt = t.table("loss_weights")
    weights = {key: wt.get(key, float) for key in list(wt.data)}
    wt.finish()
    cfg = TrainConfig(
        pretrain_epochs=t.get("pretrain_epochs", int, defaults.pretrain_epochs),
        coupled_epochs=t.get("coupled_epochs", int, defaults.coupled_epochs),
        freeze_epochs=t.get("freeze_epochs", int, defaults.freeze_epochs),
        use_pretraining=t.get("use_pretraining", bool, defaults.use_pretraining),
        lr_start=t.get("lr_start", float, defaults.lr_start),
        lr_end=t.get("lr_end", float, defaults.lr_end),
        weight_decay=t.get("weight_decay", float, defaults.weight_decay),
        tau=t.get("tau", float, defaults.tau),
        loss_weights=weights,
        insitu_sample=t.get("insitu_sample", int, defaults.insitu_sample),
        resample_period=t.get("resample_period", float, defaults.resample_period),
        resample_fraction=t.get("resample_fraction", float, defaults.resample_fraction),
        inverse=t.get("inverse", str_list, ()),
        kappa=t.get("kappa", float, defaults.kappa),
        xi_m=t.get("xi_m", float, defaults.xi_m),
        seed=seed,
        log_every=t.get("log_every", int, defaults.log_every),
        checkpoint_every=t.get("checkpoint_every", int, defaults.checkpoint_every),
        divergence_factor=t.get("divergence_factor", float, defaults.divergence_factor),
    )
    t.finish()
    return cfg


def _parse_fd(t: _Table, t_max: float) -> FDConfig:
    st = t.table("schedule")
    t_end = st.quantity("t_end", TIME_UNITS, t_max)
    schedule = SimSchedule(
        t_end=t_end,
        cfl=st.get("cfl", float, 0.5),
        report_times=st.quantity_list("report_times", TIME_UNITS, ()),
        pressure_interval=st.quantity("pressure_interval", TIME_UNITS, None),
        inlet_rate=st.quantity("inlet_rate", RATE_UNITS, None),
        max_upwind_iterations=st.get("max_upwind_iterations", int, 4),
    )
    st.finish()
    ht = t.table("histmatch")
    histmatch = NelderMeadOptions(
        max_iter=ht.get("max_iter", int, 200),
        max_evals=ht.get("max_evals", int, None),
        xatol=ht.get("xatol", float, 1e-8),
        fatol=ht.get("fatol", float, 1e-10),
        initial_step=ht.get("initial_step", float, 0.05),
        time_budget=ht.quantity("time_budget", TIME_UNITS, None),
    )
    ht.finish()
    cfg = FDConfig(resolution=t.get("resolution", int_list(3), (20, 40, 20)), schedule=schedule, histmatch=histmatch)
    t.finish()
    return cfg


def _parse_observations(t: _Table, base: Path) -> ObservationConfig:
    rf = t.get("rf", str, None)
    rate = t.get("rate", str, None)
    voxels = t.get("voxels", str_list, ())
    cfg = ObservationConfig(
        rf=base / rf if rf else None,
        rate=base / rate if rate else None,
        voxels=tuple(base / v for v in voxels),
    )
    t.finish()
    return cfg


def parse_experiment(data: dict[str, Any], base: Path = Path(".")) -> ExperimentConfig:
    """Build an ExperimentConfig from already-decoded TOML data.

    Raises:
        ConfigurationError: Naming the dotted path of any unknown, missing or
            mistyped key, or of a value out of range
    """
    root = _Table(data, "")
    seed = root.get("seed", int, 0)
    try:
        problem = _parse_problem(root.table("problem", required=True), base)
        cfg = ExperimentConfig(
            problem=problem,
            closure=_parse_closure(root.table("closure", required=True)),
            network=_parse_network(root.table("network")),
            collocation=_parse_collocation(root.table("collocation")),
            training=_parse_training(root.table("training"), seed),
            fd=_parse_fd(root.table("fd"), problem.t_max),
            observations=_parse_observations(root.table("observations"), base),
            ensemble=_parse_ensemble(root.table("ensemble")),
            seed=seed,
        )
    except ConfigurationError:
        raise
    except (FracFlowError, ValueError) as e:
        raise ConfigurationError(str(e)) from e
    root.finish()
    return cfg


def _parse_ensemble(t: _Table) -> EnsembleConfig:
    cfg = EnsembleConfig(n_seeds=t.get("n_seeds", int, 5), max_workers=t.get("max_workers", int, 1))
    t.finish()
    if cfg.n_seeds < 1 or cfg.max_workers < 1:
        raise ConfigurationError("ensemble.n_seeds and ensemble.max_workers must be >= 1")
    return cfg


def load_experiment(path: Path) -> ExperimentConfig:
    """Read an experiment TOML file.

    Raises:
        ConfigurationError: On unreadable files, TOML syntax errors (with
            line and column) and schema errors
    """
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
        raise ConfigurationError(f"{path}: {e}") from e

    cfg = parse_experiment(data, base=path.parent)
    digest = hashlib.sha256(raw).hexdigest()
    logger.debug(f"Loaded experiment {path} (sha256 {digest[:12]})")
    return replace(cfg, source=path, sha256=digest)


def build_fractures(cfg: ExperimentConfig, geometry: CoreGeometry) -> FractureSet:
    """Discretize configured planes and load any fracture point file."""
    fc = cfg.problem.fractures
    spacing = fc.spacing
    if spacing is None:
        dx, dy, dz = geometry.lattice_spacing(cfg.collocation.resolution)
        spacing = min(dx, dy) if geometry.is_slab else min(dx, dy, dz)
    fractures = [planar_fracture(geometry, plane, spacing) for plane in fc.planes]
    if fc.file is not None:
        fractures.extend(load_fracture_csv(fc.file, fc.aperture, spacing).fractures)
    return FractureSet(fractures=tuple(fractures), aperture=fc.aperture, spacing=spacing)


def build_problem(cfg: ExperimentConfig) -> FlowProblem:
    """FlowProblem for the experiment, validated."""
    pc = cfg.problem
    geometry = CoreGeometry(length=pc.length, radius=pc.radius, shape=pc.shape, depth=pc.depth)
    matrix = SaturationFunctions(
        corey=cfg.closure.corey,
        leverett=cfg.closure.leverett,
        porosity=pc.porosity,
        permeability=pc.permeability,
    )
    fc = pc.fractures
    problem = FlowProblem(
        geometry=geometry,
        fluids=pc.fluids,
        matrix=matrix,
        fracture=fracture_closure(matrix, fc.permeability, fc.porosity, fc.pc_scale),
        fractures=build_fractures(cfg, geometry),
        p_in=pc.p_in,
        p_out=pc.p_out,
        p_i=pc.p_i,
        t_max=pc.t_max,
        s_wi=pc.s_wi,
    )
    try:
        problem.validate()
    except FracFlowError as e:
        raise ConfigurationError(str(e)) from e
    return problem


def build_collocation_set(cfg: ExperimentConfig, problem: FlowProblem) -> CollocationSet:
    cc = cfg.collocation
    sampler = TemporalSampler(t_min=cc.t_min, t_max=problem.t_max, count=cc.time_count, spacing=cc.spacing)
    return build_collocation(
        problem.geometry,
        problem.fractures,
        sampler,
        resolution=cc.resolution,
        exclusion=cc.exclusion,
        n_face=cc.n_face,
        n_radial=cc.n_radial,
        seed=cfg.seed,
    )


def build_networks(cfg: ExperimentConfig, problem: FlowProblem, seed: int | None = None) -> NetworkSet:
    nc = cfg.network
    return networks_for(
        problem,
        matrix_cfg=nc.matrix,
        fracture_cfg=nc.fracture,
        weight_cfg=nc.weight,
        fourier_saturation=nc.fourier_saturation,
        seed=cfg.seed if seed is None else seed,
    )


def load_experiment_observations(cfg: ExperimentConfig, problem: FlowProblem) -> ObservationBundle:
    """Observations named in the config; an empty bundle when none are."""
    oc = cfg.observations
    if oc.is_empty:
        return ObservationBundle()
    return load_observations(
        rf_path=oc.rf,
        rate_path=oc.rate,
        voxel_paths=oc.voxels,
        geometry=problem.geometry,
        resolution=None,
    )

