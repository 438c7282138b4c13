"""Tests for the two-stage training loop, history and predictions."""

import csv
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

from fracflow.exceptions import ConfigurationError
from fracflow.geometry import Tag
from fracflow.io import ObservationBundle
from fracflow.network import load_checkpoint
from fracflow.pinn import (
    DivergenceError,
    TrainConfig,
    build_inverse_set,
    predict_fields,
    predict_rf,
    train,
    write_history_csv,
)
from fracflow.pinn.inverse import XiField
from fracflow.pinn.trainer import build_optimizer
from tests.fixtures import benchmark_problem, small_collocation, small_networks


def _config(**overrides) -> TrainConfig:
    values = dict(pretrain_epochs=2, coupled_epochs=2, freeze_epochs=1, checkpoint_every=1, log_every=1)
    values.update(overrides)
    return TrainConfig(**values)


def test_config_validation():
    """Negative epochs, bad rates and unknown weights are rejected."""
    with pytest.raises(ConfigurationError):
        TrainConfig(coupled_epochs=-1)
    with pytest.raises(ConfigurationError):
        TrainConfig(lr_start=0.0)
    with pytest.raises(ConfigurationError):
        TrainConfig(tau=-0.1)
    with pytest.raises(ConfigurationError):
        TrainConfig(loss_weights={"L_nope": 1.0})


def test_stage_epochs():
    """Disabling pre-training folds its epochs away."""
    assert _config().total_epochs == 4
    assert _config(use_pretraining=False).stage_a_epochs == 0
    assert _config(use_pretraining=False).total_epochs == 2


def test_zero_epochs_returns_initial_state():
    """A zero-epoch run trains nothing."""
    problem = benchmark_problem()
    result = train(problem, small_networks(problem), small_collocation(problem), _config(pretrain_epochs=0, coupled_epochs=0))
    assert result.history == []
    assert math.isnan(result.final_loss)
    assert result.parameters() == {}


def test_forward_training_history():
    """Pre-training rows use fracture targets, coupled rows the transfer residual."""
    problem = benchmark_problem()
    with tempfile.TemporaryDirectory() as tmpdir:
        ckpt = Path(tmpdir) / "run" / "checkpoint.pt"
        result = train(problem, small_networks(problem), small_collocation(problem), _config(), checkpoint_path=ckpt)

        assert result.epochs_run == 4
        assert [row["coupled"] for row in result.history] == [0, 0, 1, 1]
        assert "L_PT_sw_MF" in result.history[0]
        assert "L_PI_MF" in result.history[-1]
        assert "L_PT_sw_MF" not in result.history[-1]
        for row in result.history:
            assert math.isfinite(row["L_t"])
            assert row["lambda_bar"] > 0.0
        assert math.isfinite(result.final_loss)

        nets, extra = load_checkpoint(ckpt)
        assert extra["epoch"] == 4
        assert extra["inverse"] is None


def test_training_without_pretraining():
    """Every epoch is coupled when pre-training is off."""
    problem = benchmark_problem()
    result = train(problem, small_networks(problem), small_collocation(problem), _config(use_pretraining=False))
    assert [row["coupled"] for row in result.history] == [1, 1]


def test_progress_callback():
    """The callback sees every epoch with its stage."""
    problem = benchmark_problem()
    calls = []
    train(
        problem, small_networks(problem), small_collocation(problem), _config(),
        progress_callback=lambda cur, total, stage: calls.append((cur, total, stage)),
    )
    assert calls == [(1, 4, "pretrain"), (2, 4, "pretrain"), (3, 4, "coupled"), (4, 4, "coupled")]


def test_inverse_frozen_during_warmup():
    """Inverse parameters do not move while frozen."""
    problem = benchmark_problem()
    inverse = build_inverse_set(problem, ["J1", "krw_max"])
    start = inverse.floats()
    result = train(
        problem, small_networks(problem), small_collocation(problem), _config(freeze_epochs=10),
        inverse=inverse,
    )
    assert result.parameters() == start
    assert "gamma_J1" in result.history[0]


def test_inverse_moves_after_warmup():
    """Unfrozen inverse parameters are updated by the optimizer."""
    problem = benchmark_problem()
    inverse = build_inverse_set(problem, ["J1", "krw_max"])
    start = inverse.floats()
    obs = ObservationBundle(rf_times=np.array([5.0e5]), rf_values=np.array([0.3]))
    result = train(
        problem, small_networks(problem), small_collocation(problem), _config(freeze_epochs=0),
        observations=obs, inverse=inverse,
    )
    assert result.parameters() != start
    assert all(v > 0.0 for v in result.parameters().values())
    assert "L_RF" in result.history[0]


def test_divergence_restores_checkpoint():
    """A non-finite total raises with the last good state attached."""
    problem = benchmark_problem()
    with tempfile.TemporaryDirectory() as tmpdir:
        ckpt = Path(tmpdir) / "checkpoint.pt"
        with pytest.raises(DivergenceError) as exc:
            train(
                problem, small_networks(problem), small_collocation(problem),
                _config(loss_weights={"L_PI_M": float("inf")}),
                checkpoint_path=ckpt,
            )
        assert exc.value.checkpoint is not None
        assert exc.value.checkpoint["epoch"] == 0
        assert ckpt.exists()


def test_write_history_csv_union_of_columns():
    """Rows with different keys share one header."""
    with tempfile.TemporaryDirectory() as tmpdir:
        path = write_history_csv(
            Path(tmpdir) / "out" / "history.csv",
            [{"epoch": 0, "L_t": 1.5}, {"epoch": 1, "L_t": 0.5, "L_RF": 0.25}],
        )
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    assert rows[0] == ["epoch", "L_t", "L_RF"]
    assert rows[1] == ["0", "1.5", ""]
    assert rows[2] == ["1", "0.5", "0.25"]


def test_predict_fields_shape():
    """Lattice predictions have the lattice shape and stay in the mobile window."""
    problem = benchmark_problem()
    sw, pn = predict_fields(small_networks(problem), problem, (4, 6, 1), 1.0e5)
    assert sw.shape == (4, 6, 1)
    assert pn.shape == (4, 6, 1)
    inside = np.isfinite(sw)
    assert inside.any()
    assert np.all(sw[inside] >= 0.0)
    assert np.all(sw[inside] <= 0.67 + 1e-12)


def test_predict_rf_per_time():
    """One RF value per requested time."""
    problem = benchmark_problem()
    points = small_collocation(problem)[Tag.MATRIX]
    rf = predict_rf(small_networks(problem), problem, points, [0.0, 5.0e5, 1.0e6])
    assert rf.shape == (3,)
    assert np.all(np.isfinite(rf))


def test_optimizer_decays_networks_only():
    """Weight decay applies to the networks; fracture multipliers and inverse exponents are not decayed."""
    problem = benchmark_problem()
    nets = small_networks(problem)
    xi = XiField(5)
    inverse = build_inverse_set(problem, ["J1", "krw_max"])
    optimizer = build_optimizer(nets, xi, inverse, _config(weight_decay=1e-3))

    decay = {id(p): group["weight_decay"] for group in optimizer.param_groups for p in group["params"]}
    assert decay[id(xi.xi)] == 0.0
    assert decay[id(inverse.theta)] == 0.0
    assert all(decay[id(p)] == 1e-3 for p in nets.parameters())
