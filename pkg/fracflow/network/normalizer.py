"""Z-score normalization of network inputs and outputs."""

from dataclasses import dataclass

import numpy as np
import torch

EPS_STD = 1e-8


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Per-channel mean and standard deviation, with std floored at EPS_STD."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        std = np.maximum(np.atleast_1d(np.asarray(self.std, dtype=float)), EPS_STD)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @classmethod
    def fit(cls, data: np.ndarray) -> "Normalizer":
        """Two-pass mean and population standard deviation per column."""
        data = np.atleast_2d(np.asarray(data, dtype=float))
        mean = data.mean(axis=0)
        std = np.sqrt(((data - mean) ** 2).mean(axis=0))
        return cls(mean=mean, std=std)

    @classmethod
    def from_range(cls, lo, hi) -> "Normalizer":
        """Statistics of a uniform distribution on [lo, hi] per channel."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        return cls(mean=(lo + hi) / 2.0, std=np.abs(hi - lo) / np.sqrt(12.0))

    def _stats(self, x):
        if isinstance(x, torch.Tensor):
            return (torch.as_tensor(self.mean, dtype=x.dtype, device=x.device),
                    torch.as_tensor(self.std, dtype=x.dtype, device=x.device))
        return self.mean, self.std

    def normalize(self, x):
        mean, std = self._stats(x)
        return (x - mean) / std

    def denormalize(self, xn):
        mean, std = self._stats(xn)
        return xn * std + mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Normalizer":
        return cls(mean=np.asarray(data["mean"]), std=np.asarray(data["std"]))
