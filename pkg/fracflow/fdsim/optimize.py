"""Derivative-free simplex minimization with a best-so-far trace."""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

logger = logging.getLogger(__name__)


class _BudgetExhausted(Exception):
    """Raised inside the objective once the wall-clock budget is spent."""


@dataclass(frozen=True)
class NelderMeadOptions:
    """Stopping rules and the initial simplex scale.

    Reflection, expansion, contraction and shrink use the standard
    coefficients 1, 2, 0.5 and 0.5.
    """

    max_iter: int = 2000
    max_evals: int | None = None
    xatol: float = 1e-8
    fatol: float = 1e-10
    initial_step: float = 0.05
    time_budget: float | None = None


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fun: float
    n_iter: int
    n_evals: int
    status: str
    trace: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    simplex = np.tile(x0, (len(x0) + 1, 1))
    for i in range(len(x0)):
        simplex[i + 1, i] += step if x0[i] == 0.0 else step * max(1.0, abs(x0[i]))
    return simplex


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0,
    options: NelderMeadOptions = NelderMeadOptions(),
) -> NelderMeadResult:
    """Minimize ``objective`` from ``x0``.

    The trace holds the best objective value seen after each iteration and
    is non-increasing. Running out of iterations, evaluations or time
    returns the best point found so far with the matching status.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    best = {"x": x0.copy(), "f": np.inf, "evals": 0}
    trace: list[float] = []
    started = time.monotonic()

    def wrapped(x: np.ndarray) -> float:
        if options.time_budget is not None and time.monotonic() - started > options.time_budget:
            raise _BudgetExhausted
        value = float(objective(x))
        best["evals"] += 1
        if value < best["f"]:
            best["f"], best["x"] = value, np.array(x, dtype=float)
        return value

    def callback(xk: np.ndarray) -> None:
        trace.append(best["f"])

    scipy_options = {
        "maxiter": options.max_iter,
        "xatol": options.xatol,
        "fatol": options.fatol,
        "initial_simplex": _initial_simplex(x0, options.initial_step),
        "adaptive": False,
    }
    if options.max_evals is not None:
        scipy_options["maxfev"] = options.max_evals

    try:
        res = minimize(wrapped, x0, method="Nelder-Mead", callback=callback, options=scipy_options)
    except _BudgetExhausted:
        logger.info(f"Nelder-Mead stopped on its {options.time_budget} s budget after {best['evals']} evaluations")
        return NelderMeadResult(
            x=best["x"], fun=best["f"], n_iter=len(trace), n_evals=best["evals"],
            status="budget", trace=trace,
        )

    if res.success:
        status = "converged"
    elif options.max_evals is not None and res.nfev >= options.max_evals:
        status = "max_evals"
    else:
        status = "max_iter"
    logger.debug(f"Nelder-Mead {status} after {res.nit} iterations, f={best['f']:.6g}")
    return NelderMeadResult(
        x=best["x"], fun=best["f"], n_iter=int(res.nit), n_evals=best["evals"],
        status=status, trace=trace,
    )
