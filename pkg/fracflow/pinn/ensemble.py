"""Ensemble of inverse runs from independently randomized starting values."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations
from types import MappingProxyType
from typing import Any

import numpy as np

from fracflow.closure import curve_table
from fracflow.exceptions import ConfigurationError, FracFlowError
from fracflow.geometry import CollocationSet, Tag
from fracflow.pinn.inverse import build_inverse_set
from fracflow.pinn.losses import nmae
from fracflow.pinn.trainer import TrainConfig, networks_for, train
from fracflow.problem import FlowProblem, with_parameters

logger = logging.getLogger(__name__)

# Curves compared across seeds and against the truth
COMPARED_CURVES = {"lambda": "lambda", "pc": "pc_Pa", "krw": "krw", "krnw": "krnw"}


@dataclass(eq=False)
class SeedResult:
    """Outcome of one seed: fitted values, their curves and the error against the truth."""

    seed: int
    parameters: dict[str, float]
    curves: dict[str, np.ndarray]
    final_loss: float
    status: str = "ok"
    error: str | None = None
    nmae: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(eq=False)
class EnsembleReport:
    """Per-seed results with mean error against the truth and cross-seed dispersion."""

    seeds: list[SeedResult]
    mean_nmae: dict[str, float]
    dispersion: dict[str, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "seeds": [
                {
                    "seed": s.seed,
                    "status": s.status,
                    "error": s.error,
                    "final_loss": s.final_loss,
                    "parameters": s.parameters,
                    "nmae": s.nmae,
                }
                for s in self.seeds
            ],
            "mean_nmae": self.mean_nmae,
            "dispersion": self.dispersion,
        }


def _pack(colloc: CollocationSet) -> dict[str, Any]:
    return {
        "geometry": colloc.geometry,
        "fractures": colloc.fractures,
        "resolution": colloc.resolution,
        "exclusion": colloc.exclusion,
        "sampler": colloc.sampler,
        "points": {tag.value: np.asarray(v) for tag, v in colloc.points.items()},
    }


def _unpack(data: dict[str, Any]) -> CollocationSet:
    points = {Tag(k): v for k, v in data["points"].items()}
    return CollocationSet(**{**data, "points": MappingProxyType(points)})


def _curves(problem: FlowProblem, n: int) -> dict[str, np.ndarray]:
    table = curve_table(problem.matrix, problem.fluids, n)
    return {name: table[column] for name, column in COMPARED_CURVES.items()}


def _run_seed(job: dict[str, Any]) -> SeedResult:
    problem: FlowProblem = job["problem"]
    config: TrainConfig = replace(job["config"], seed=job["seed"])
    colloc = _unpack(job["colloc"])
    seed = job["seed"]

    rng = np.random.default_rng(seed)
    nets = networks_for(problem, seed=seed, **job["net_kwargs"])
    inverse = build_inverse_set(problem, config.inverse, rng, config.kappa, config.xi_m)
    status, error, final_loss = "ok", None, float("nan")
    try:
        result = train(problem, nets, colloc, config, observations=job["observations"], inverse=inverse)
        final_loss = result.final_loss
    except FracFlowError as e:
        status, error = "failed", f"{type(e).__name__}: {e}"

    parameters = inverse.floats()
    curves = _curves(with_parameters(problem, parameters), job["curve_points"])
    truth = job["truth"]
    errors = {}
    if truth is not None and status == "ok":
        errors = {name: nmae(curves[name], truth[name]) for name in curves}
    return SeedResult(
        seed=seed,
        parameters=parameters,
        curves=curves,
        final_loss=final_loss,
        status=status,
        error=error,
        nmae=errors,
    )


def dispersion(curves: list[np.ndarray]) -> float:
    """Mean pairwise NMAE over all seed pairs; 0 for fewer than two curves."""
    pairs = list(combinations(curves, 2))
    if not pairs:
        return 0.0
    return float(np.mean([nmae(a, b) for a, b in pairs]))


def ensemble_invert(
    problem: FlowProblem,
    colloc: CollocationSet,
    config: TrainConfig,
    n_seeds: int,
    observations=None,
    truth: FlowProblem | None = None,
    max_workers: int = 1,
    net_kwargs: dict[str, Any] | None = None,
    curve_points: int = 1001,
    seed_offset: int | None = None,
) -> EnsembleReport:
    """Run ``train`` once per seed with randomized inverse starting values.

    Seeds run in separate processes when ``max_workers`` > 1. A failing seed
    is recorded in its SeedResult and left out of the statistics.
    """
    if n_seeds < 1:
        raise ConfigurationError(f"ensemble needs at least one seed, got {n_seeds}")
    if not config.inverse:
        raise ConfigurationError("ensemble inversion needs at least one inverse parameter")

    base = config.seed if seed_offset is None else seed_offset
    truth_curves = _curves(truth, curve_points) if truth is not None else None
    jobs = [
        {
            "problem": problem,
            "config": config,
            "colloc": _pack(colloc),
            "seed": base + i,
            "observations": observations,
            "net_kwargs": net_kwargs or {},
            "curve_points": curve_points,
            "truth": truth_curves,
        }
        for i in range(n_seeds)
    ]

    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_run_seed, jobs))
    else:
        results = [_run_seed(job) for job in jobs]

    for r in results:
        if r.ok:
            logger.info(f"Seed {r.seed}: L_t={r.final_loss:.4e} nmae={r.nmae}")
        else:
            logger.warning(f"Seed {r.seed} failed: {r.error}")

    good = [r for r in results if r.ok]
    mean_nmae = {}
    if truth_curves is not None and good:
        mean_nmae = {name: float(np.mean([r.nmae[name] for r in good])) for name in COMPARED_CURVES}
    spread = {name: dispersion([r.curves[name] for r in good]) for name in COMPARED_CURVES}
    return EnsembleReport(seeds=results, mean_nmae=mean_nmae, dispersion=spread)
