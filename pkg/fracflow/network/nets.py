"""Field networks for matrix and fracture plus the self-adaptive weight networks."""

from dataclasses import replace

import numpy as np
import torch
from scipy.special import expit
from torch import nn

from fracflow.autodiff import DTYPE
from fracflow.network.config import FRACTURE_CONFIG, MATRIX_CONFIG, WEIGHT_CONFIG, MLPConfig
from fracflow.network.layers import build_network
from fracflow.network.normalizer import Normalizer

FIELD_ROLES = ("matrix_sw", "matrix_p", "fracture_sw", "fracture_p")
WEIGHT_ROLES = ("omega_m", "omega_f", "omega_mf")


def saturation_head(raw, s_min, s_max):
    """Smooth map of a raw saturation output into (s_min, s_max).

    The slope is 1 at the window midpoint and positive everywhere.
    """
    width = s_max - s_min
    mid = (s_min + s_max) / 2.0
    z = 4.0 * (raw - mid) / width
    if isinstance(z, torch.Tensor):
        return s_min + width * torch.sigmoid(z)
    return s_min + width * expit(z)


def _buffer(values) -> torch.Tensor:
    return torch.as_tensor(np.asarray(values, dtype=float), dtype=DTYPE)


class FieldNetwork(nn.Module):
    """A network wrapped with its input and output normalizers.

    Takes physical (x, y, z, t) rows and returns one physical field value per
    row. Saturation fields pass through ``saturation_head``.
    """

    def __init__(
        self,
        net: nn.Module,
        in_norm: Normalizer,
        out_norm: Normalizer,
        window: tuple[float, float] | None = None,
    ):
        super().__init__()
        self.net = net
        self.in_norm = in_norm
        self.out_norm = out_norm
        self.saturation = window is not None
        self.register_buffer("in_mean", _buffer(in_norm.mean))
        self.register_buffer("in_std", _buffer(in_norm.std))
        self.register_buffer("out_mean", _buffer(out_norm.mean))
        self.register_buffer("out_std", _buffer(out_norm.std))
        self.register_buffer("window", _buffer(window if window is not None else (0.0, 1.0)))

    def forward(self, X: torch.Tensor, window=None) -> torch.Tensor:
        y = self.net((X - self.in_mean) / self.in_std)[..., 0]
        raw = y * self.out_std[0] + self.out_mean[0]
        if not self.saturation:
            return raw
        s_min, s_max = window if window is not None else (self.window[0], self.window[1])
        return saturation_head(raw, s_min, s_max)


class NetworkSet(nn.Module):
    """Matrix and fracture (s_w, p_nw) networks with three residual-weight networks."""

    def __init__(
        self,
        fields: dict[str, FieldNetwork],
        weights: dict[str, nn.Module],
        in_norm: Normalizer,
        configs: dict[str, MLPConfig],
    ):
        super().__init__()
        self.fields = nn.ModuleDict(fields)
        self.weights = nn.ModuleDict(weights)
        self.register_buffer("in_mean", _buffer(in_norm.mean))
        self.register_buffer("in_std", _buffer(in_norm.std))
        self.in_norm = in_norm
        self.configs = dict(configs)

    def describe(self) -> dict:
        """Normalizers and saturation windows needed to rebuild this set."""
        return {
            "in_norm": self.in_norm.to_dict(),
            "out_norms": {role: f.out_norm.to_dict() for role, f in self.fields.items()},
            "windows": {
                role: [float(w) for w in f.window] for role, f in self.fields.items() if f.saturation
            },
        }

    def matrix(self, X: torch.Tensor, window=None) -> tuple[torch.Tensor, torch.Tensor]:
        """Matrix water saturation and non-wetting pressure at X."""
        return self.fields["matrix_sw"](X, window), self.fields["matrix_p"](X)

    def fracture(self, X: torch.Tensor, window=None) -> tuple[torch.Tensor, torch.Tensor]:
        """Fracture water saturation and non-wetting pressure at X."""
        return self.fields["fracture_sw"](X, window), self.fields["fracture_p"](X)

    def omega(self, role: str, X: torch.Tensor) -> torch.Tensor:
        """Log-weight field of one weight network at X."""
        return self.weights[role]((X - self.in_mean) / self.in_std)[..., 0]

    def field_parameters(self) -> list[nn.Parameter]:
        return list(self.fields.parameters())

    def weight_parameters(self) -> list[nn.Parameter]:
        return list(self.weights.parameters())


def build_network_set(
    in_norm: Normalizer,
    matrix_window: tuple[float, float],
    fracture_window: tuple[float, float],
    pressure_range: tuple[float, float],
    matrix_cfg: MLPConfig = MATRIX_CONFIG,
    fracture_cfg: MLPConfig = FRACTURE_CONFIG,
    weight_cfg: MLPConfig = WEIGHT_CONFIG,
    fourier_saturation: bool = True,
    seed: int = 0,
) -> NetworkSet:
    """Build all seven networks with distinct, reproducible seeds.

    Saturation networks take the Fourier path when ``fourier_saturation``;
    pressure and weight networks never do.
    """
    configs = {
        "matrix_sw": replace(matrix_cfg, out_features=1, fourier_path=fourier_saturation),
        "matrix_p": replace(matrix_cfg, out_features=1, fourier_path=False),
        "fracture_sw": replace(fracture_cfg, out_features=1, fourier_path=fourier_saturation),
        "fracture_p": replace(fracture_cfg, out_features=1, fourier_path=False),
        "omega_m": replace(weight_cfg, out_features=1, fourier_path=False),
        "omega_f": replace(weight_cfg, out_features=1, fourier_path=False),
        "omega_mf": replace(weight_cfg, out_features=1, fourier_path=False),
    }
    windows = {"matrix_sw": matrix_window, "fracture_sw": fracture_window}
    p_norm = Normalizer.from_range(*pressure_range)

    fields = {}
    for i, role in enumerate(FIELD_ROLES):
        net = build_network(configs[role], seed + i)
        if role in windows:
            lo, hi = windows[role]
            # Unit normalized output moves the head by one logit
            out_norm = Normalizer(mean=[(lo + hi) / 2.0], std=[(hi - lo) / 4.0])
            fields[role] = FieldNetwork(net, in_norm, out_norm, window=windows[role])
        else:
            fields[role] = FieldNetwork(net, in_norm, p_norm)

    weights = {
        role: build_network(configs[role], seed + len(FIELD_ROLES) + i)
        for i, role in enumerate(WEIGHT_ROLES)
    }
    return NetworkSet(fields, weights, in_norm, configs)
