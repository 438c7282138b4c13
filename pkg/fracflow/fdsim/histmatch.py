"""History matching of RF with the reference simulator inside a simplex search."""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from fracflow.closure import lambda_area
from fracflow.exceptions import ConfigurationError, FracFlowError
from fracflow.fdsim.grid import build_grid
from fracflow.fdsim.impes import SimSchedule, simulate
from fracflow.fdsim.optimize import NelderMeadOptions, NelderMeadResult, nelder_mead
from fracflow.problem import FlowProblem, with_parameters

logger = logging.getLogger(__name__)

FAILURE_PENALTY = 1.0e3


@dataclass
class HistMatchResult:
    """Fitted parameters with the optimizer record and per-evaluation history."""

    parameters: dict[str, float]
    objective: float
    optimizer: NelderMeadResult
    evaluations: list[dict] = field(default_factory=list)
    failures: int = 0


def _rf_mismatch(problem, resolution, schedule, times, observed) -> float:
    grid = build_grid(problem, resolution)
    result = simulate(problem, grid, schedule)
    return float(np.mean(np.abs(result.rf_at(times) - observed)))


def histmatch_fd(
    problem: FlowProblem,
    resolution: tuple[int, int, int],
    times,
    observed_rf,
    x0: dict[str, float],
    options: NelderMeadOptions = NelderMeadOptions(max_iter=200),
    schedule: SimSchedule | None = None,
) -> HistMatchResult:
    """Fit closure parameters so the simulated RF matches ``observed_rf``.

    The search runs on log-parameters so every candidate stays positive.
    A candidate whose closure is invalid or whose simulation fails scores
    FAILURE_PENALTY.

    Raises:
        ConfigurationError: If the observation series is empty or ragged
    """
    times = np.asarray(times, dtype=float)
    observed = np.asarray(observed_rf, dtype=float)
    if times.size == 0 or times.shape != observed.shape:
        raise ConfigurationError("RF observations must be a non-empty series of matching times and values")
    if any(v <= 0.0 for v in x0.values()):
        raise ConfigurationError("history matching needs strictly positive starting parameters")

    names = list(x0)
    schedule = schedule or SimSchedule(t_end=float(times.max()))
    if schedule.t_end < times.max():
        schedule = replace(schedule, t_end=float(times.max()))
    evaluations: list[dict] = []
    failures = 0

    def objective(x: np.ndarray) -> float:
        nonlocal failures
        values = dict(zip(names, np.exp(x).tolist()))
        try:
            candidate = with_parameters(problem, values)
            candidate.validate()
            value = _rf_mismatch(candidate, resolution, schedule, times, observed)
        except FracFlowError as e:
            failures += 1
            logger.warning(f"Candidate {values} failed: {e}")
            value = FAILURE_PENALTY
        evaluations.append({**values, "objective": value})
        return value

    logger.info(f"History matching {names} against {times.size} RF points")
    res = nelder_mead(objective, np.log([x0[n] for n in names]), options)
    fitted = dict(zip(names, np.exp(res.x).tolist()))
    try:
        area = f"{lambda_area(with_parameters(problem, fitted).matrix, problem.fluids):.4g}"
    except FracFlowError:
        area = "n/a"
    logger.info(f"History match {res.status}: MAE={res.fun:.4g}, lambda area={area}")
    return HistMatchResult(
        parameters=fitted,
        objective=res.fun,
        optimizer=res,
        evaluations=evaluations,
        failures=failures,
    )
