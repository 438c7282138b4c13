"""Tests for network checkpoints."""

import tempfile
from pathlib import Path

import numpy as np
import pytest
import torch

from fracflow.autodiff import DTYPE
from fracflow.network import CheckpointError, load_checkpoint, save_checkpoint
from tests.fixtures import benchmark_problem, small_networks


def test_checkpoint_restores_outputs():
    """A reloaded set should reproduce every field and weight output."""
    nets = small_networks(benchmark_problem(), seed=2, fourier_saturation=True)
    X = torch.as_tensor(np.array([[0.001, 0.02, 0.0, 500.0]]), dtype=DTYPE)
    with tempfile.TemporaryDirectory() as tmpdir:
        path = save_checkpoint(Path(tmpdir) / "ckpt" / "nets.pt", nets, extra={"epoch": 12})
        loaded, extra = load_checkpoint(path)

    assert extra == {"epoch": 12}
    with torch.no_grad():
        for a, b in zip(nets.matrix(X) + nets.fracture(X), loaded.matrix(X) + loaded.fracture(X)):
            assert torch.equal(a, b)
        assert torch.equal(nets.omega("omega_mf", X), loaded.omega("omega_mf", X))


def test_checkpoint_rejects_other_files():
    """A file of another format is rejected."""
    with tempfile.TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "other.pt"
        torch.save({"format": "something-else"}, path)
        with pytest.raises(CheckpointError):
            load_checkpoint(path)


def test_checkpoint_missing_file():
    """A missing file is a checkpoint error."""
    with pytest.raises(CheckpointError):
        load_checkpoint(Path("/nonexistent/fracflow/nets.pt"))
