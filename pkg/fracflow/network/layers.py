"""Fully connected networks with adaptive tanh and an optional Fourier path."""

import torch
from torch import nn

from fracflow.autodiff import DTYPE
from fracflow.network.config import MLPConfig
from fracflow.network.exceptions import NonFiniteActivationError


class AdaptiveTanh(nn.Module):
    """tanh(a * z) with one slope ``a`` per layer, initialized to 1."""

    def __init__(self, trainable: bool = True):
        super().__init__()
        slope = torch.ones((), dtype=DTYPE)
        if trainable:
            self.slope = nn.Parameter(slope)
        else:
            self.register_buffer("slope", slope)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return torch.tanh(self.slope * z)


def _check_finite(h: torch.Tensor, where: str) -> None:
    if not torch.isfinite(h).all():
        raise NonFiniteActivationError(f"non-finite activation in {where}")


class MLP(nn.Module):
    """Plain multilayer perceptron: depth hidden layers of equal width."""

    def __init__(self, cfg: MLPConfig, in_features: int | None = None, out_features: int | None = None):
        super().__init__()
        self.cfg = cfg
        n_in = cfg.in_features if in_features is None else in_features
        n_out = cfg.out_features if out_features is None else out_features
        sizes = [n_in] + [cfg.width] * cfg.depth
        self.hidden = nn.ModuleList(
            nn.Linear(a, b, dtype=DTYPE) for a, b in zip(sizes[:-1], sizes[1:])
        )
        self.activations = nn.ModuleList(AdaptiveTanh(cfg.adaptive) for _ in range(cfg.depth))
        self.output = nn.Linear(cfg.width, n_out, dtype=DTYPE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = x
        for i, (layer, act) in enumerate(zip(self.hidden, self.activations)):
            h = act(layer(h))
            _check_finite(h, f"hidden layer {i}")
        return self.output(h)


class FourierMLP(nn.Module):
    """Encoder, real FFT over features, latent MLP, inverse FFT, decoder.

    The latent MLP sees the real and imaginary parts of the width//2 + 1
    coefficients side by side. The inverse transform returns real values.
    """

    def __init__(self, cfg: MLPConfig):
        super().__init__()
        self.cfg = cfg
        self.n_modes = cfg.width // 2 + 1
        self.encoder = nn.Linear(cfg.in_features, cfg.width, dtype=DTYPE)
        self.encoder_act = AdaptiveTanh(cfg.adaptive)
        self.latent = MLP(cfg, in_features=2 * self.n_modes, out_features=2 * self.n_modes)
        self.decoder = nn.Linear(cfg.width, cfg.out_features, dtype=DTYPE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.encoder_act(self.encoder(x))
        _check_finite(h, "encoder")
        spec = torch.fft.rfft(h, dim=-1)
        z = self.latent(torch.cat([spec.real, spec.imag], dim=-1))
        spec = torch.complex(z[..., : self.n_modes], z[..., self.n_modes:])
        h = torch.fft.irfft(spec, n=self.cfg.width, dim=-1)
        _check_finite(h, "inverse FFT")
        return self.decoder(h)


def init_glorot(module: nn.Module, seed: int) -> nn.Module:
    """Glorot-uniform weights, zero biases and unit tanh slopes, all seeded."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        for m in module.modules():
            if isinstance(m, nn.Linear):
                nn.init.xavier_uniform_(m.weight)
                nn.init.zeros_(m.bias)
            elif isinstance(m, AdaptiveTanh):
                with torch.no_grad():
                    m.slope.fill_(1.0)
    return module


def build_network(cfg: MLPConfig, seed: int) -> nn.Module:
    """Construct and initialize the network described by ``cfg``."""
    net = FourierMLP(cfg) if cfg.fourier_path else MLP(cfg)
    return init_glorot(net, seed)


def adaptive_slopes(module: nn.Module) -> list[torch.Tensor]:
    """Trainable tanh slopes of every adaptive layer in ``module``."""
    return [m.slope for m in module.modules() if isinstance(m, AdaptiveTanh) and isinstance(m.slope, nn.Parameter)]
