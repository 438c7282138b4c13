"""Temporal collocation sampling on a square-root time axis."""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from fracflow.geometry.exceptions import GeometryError


class Spacing(str, Enum):
    """How sample times are laid out between t_min and t_max."""

    SQRT_UNIFORM = "sqrt_uniform"
    UNIFORM = "uniform"
    RANDOM_SQRT = "random_sqrt"


@dataclass(frozen=True)
class TemporalSampler:
    """Time range and layout for collocation times (seconds)."""

    t_min: float
    t_max: float
    count: int = 100
    spacing: Spacing = Spacing.RANDOM_SQRT

    def __post_init__(self):
        if not 0.0 < self.t_min < self.t_max:
            raise GeometryError(
                f"temporal sampler needs 0 < t_min < t_max, got {self.t_min}, {self.t_max}"
            )
        if self.count < 1:
            raise GeometryError(f"temporal sampler count must be >= 1, got {self.count}")


def sample_times(s: TemporalSampler, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw ``s.count`` times in ascending order.

    sqrt_uniform gives equally spaced square roots; random_sqrt draws one
    time uniformly inside each equal-width bin of the square-root axis.
    """
    lo, hi = np.sqrt(s.t_min), np.sqrt(s.t_max)
    if s.spacing == Spacing.SQRT_UNIFORM:
        times = np.linspace(lo, hi, s.count) ** 2
        times[0], times[-1] = s.t_min, s.t_max
        return times
    if s.spacing == Spacing.UNIFORM:
        return np.linspace(s.t_min, s.t_max, s.count)

    rng = rng if rng is not None else np.random.default_rng()
    edges = np.linspace(lo, hi, s.count + 1)
    roots = edges[:-1] + rng.uniform(size=s.count) * np.diff(edges)
    return roots ** 2


def assign_times(s: TemporalSampler, n: int, rng: np.random.Generator) -> np.ndarray:
    """One time per spatial point, drawn with the sampler layout and shuffled."""
    if n == 0:
        return np.empty(0)
    times = sample_times(replace(s, count=n), rng)
    return rng.permutation(times)
