"""Positive reparameterization of inverse parameters and per-point fracture multipliers."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch
from torch import nn

from fracflow.autodiff import DTYPE
from fracflow.exceptions import ConfigurationError
from fracflow.problem import FlowProblem, parameter_values

DEFAULT_KAPPA = 0.5
DEFAULT_XI_M = 0.6


def inverse_value(gamma_i, theta, kappa: float = DEFAULT_KAPPA):
    """Physical value gamma_i * exp(kappa * theta); positive whenever gamma_i is."""
    if isinstance(theta, torch.Tensor):
        return gamma_i * torch.exp(kappa * theta)
    return gamma_i * float(np.exp(kappa * theta))


def randomize_initial(base: float, xi_m: float, rng: np.random.Generator) -> float:
    """Scatter a base value by up to a factor 10**xi_m either way (log-uniform)."""
    if not base > 0.0:
        raise ConfigurationError(f"inverse parameter base value must be > 0, got {base}")
    xi = rng.uniform(-1.0, 1.0)
    return float(base * 10.0 ** (xi * xi_m))


@dataclass(frozen=True)
class InverseParameter:
    """One estimated closure parameter.

    ``base`` is the prior guess, ``initial`` the randomized starting value
    the exponent is measured from.
    """

    name: str
    base: float
    initial: float
    kappa: float = DEFAULT_KAPPA
    xi_m: float = DEFAULT_XI_M


class InverseParamSet(nn.Module):
    """Trainable exponents theta for a set of inverse parameters, all starting at 0."""

    def __init__(self, params: Sequence[InverseParameter]):
        super().__init__()
        if len({p.name for p in params}) != len(params):
            raise ConfigurationError("duplicate inverse parameter names")
        self.params = tuple(params)
        self.theta = nn.Parameter(torch.zeros(len(params), dtype=DTYPE))
        self.register_buffer("initial", torch.tensor([p.initial for p in params], dtype=DTYPE))
        self.register_buffer("kappa", torch.tensor([p.kappa for p in params], dtype=DTYPE))
        self.frozen = False

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    def values(self) -> dict[str, torch.Tensor]:
        """Current physical values as 0-d tensors carrying gradients to theta."""
        gamma = inverse_value(self.initial, self.theta, self.kappa)
        return {name: gamma[i] for i, name in enumerate(self.names)}

    def floats(self) -> dict[str, float]:
        with torch.no_grad():
            return {k: float(v) for k, v in self.values().items()}


def build_inverse_set(
    problem: FlowProblem,
    names: Sequence[str],
    rng: np.random.Generator | None = None,
    kappa: float = DEFAULT_KAPPA,
    xi_m: float = DEFAULT_XI_M,
    base: dict[str, float] | None = None,
) -> InverseParamSet:
    """Inverse set seeded from the problem's values (or ``base``), randomized when ``rng`` is given."""
    base = base or parameter_values(problem, names)
    params = []
    for name in names:
        b = float(base[name])
        start = randomize_initial(b, xi_m, rng) if rng is not None and xi_m > 0.0 else b
        if not start > 0.0:
            raise ConfigurationError(f"inverse parameter '{name}' needs a positive start, got {start}")
        params.append(InverseParameter(name=name, base=b, initial=start, kappa=kappa, xi_m=xi_m))
    return InverseParamSet(params)


class XiField(nn.Module):
    """One trainable multiplier per matrix-fracture point, initialized to 1."""

    def __init__(self, n: int):
        super().__init__()
        self.xi = nn.Parameter(torch.ones(n, dtype=DTYPE))

    def forward(self) -> torch.Tensor:
        return self.xi
