"""Tests for experiment TOML parsing, unit conversion and builders."""

import copy
import tempfile
from pathlib import Path

import pytest

from fracflow.closure import CP_TO_PA_S, MD_TO_M2, PSI_TO_PA
from fracflow.config import (
    build_collocation_set,
    build_problem,
    load_experiment,
    parse_experiment,
)
from fracflow.exceptions import ConfigurationError
from fracflow.geometry import Shape, Tag
from fracflow.problem import DEFAULT_INVERSE

CONFIGS = Path(__file__).parents[2] / "configs"

MINIMAL = {
    "problem": {
        "shape": "slab",
        "length_cm": 5.8,
        "radius_mm": 12.5,
        "depth_cm": 1.0,
        "p_in_bar": 36.0,
        "p_out_bar": 32.0,
        "t_max_h": 10.0,
        "fluids": {"mu_w_cP": 1.0, "mu_nw_Pa_s": 2e-5, "rho_w_kg_m3": 1000.0, "rho_nw_kg_m3": 80.0},
        "rock": {"porosity": 0.1, "permeability_mD": 1.0},
    },
    "closure": {
        "corey": {"krw_max": 0.2, "krnw_max": 0.2, "n_w1": 1.5, "n_w2": 1.5, "n_nw1": 2, "n_nw2": 2},
        "leverett": {"J1": 0.02, "J2": 0.01, "sigma_N_m": 0.04},
    },
}


def _minimal(**changes) -> dict:
    data = copy.deepcopy(MINIMAL)
    for dotted, value in changes.items():
        *parents, key = dotted.split(".")
        table = data
        for p in parents:
            table = table.setdefault(p, {})
        if value is None:
            table.pop(key, None)
        else:
            table[key] = value
    return data


def test_minimal_config_units():
    """Quantities are converted to SI from their key suffix."""
    cfg = parse_experiment(_minimal())
    p = cfg.problem
    assert p.shape is Shape.SLAB
    assert p.length == pytest.approx(0.058)
    assert p.radius == pytest.approx(0.0125)
    assert p.p_in == pytest.approx(3.6e6)
    assert p.t_max == pytest.approx(36000.0)
    assert p.fluids.mu_w == pytest.approx(CP_TO_PA_S)
    assert p.fluids.mu_nw == pytest.approx(2e-5)
    assert p.permeability == pytest.approx(MD_TO_M2)
    assert p.p_i == p.p_out
    assert cfg.closure.corey.s_nwr == 0.0
    assert cfg.training.inverse == ()


def test_unknown_key_is_named():
    """Misspelled keys fail with their dotted path."""
    with pytest.raises(ConfigurationError, match="problem.rock.porosty"):
        parse_experiment(_minimal(**{"problem.rock.porosty": 0.1}))
    with pytest.raises(ConfigurationError, match="unknown key 'extra'"):
        parse_experiment(_minimal(extra=1))


def test_one_unit_per_quantity():
    """The same quantity in two units is ambiguous."""
    with pytest.raises(ConfigurationError, match="one unit"):
        parse_experiment(_minimal(**{"problem.length_m": 0.058}))


def test_missing_and_mistyped_keys():
    """Required keys must be present and numbers must be numbers."""
    with pytest.raises(ConfigurationError, match="p_in"):
        parse_experiment(_minimal(**{"problem.p_in_bar": None}))
    with pytest.raises(ConfigurationError, match="expected a number"):
        parse_experiment(_minimal(**{"problem.rock.porosity": "high"}))
    with pytest.raises(ConfigurationError, match="closure"):
        parse_experiment(_minimal(closure=None))
    with pytest.raises(ConfigurationError):
        parse_experiment(_minimal(**{"problem.shape": "sphere"}))


def test_training_values_checked():
    """Loss weight keys and ensemble sizes are validated at load time."""
    with pytest.raises(ConfigurationError):
        parse_experiment(_minimal(**{"training.loss_weights.L_nope": 1.0}))
    with pytest.raises(ConfigurationError):
        parse_experiment(_minimal(**{"ensemble.n_seeds": 0}))
    cfg = parse_experiment(_minimal(**{"training.loss_weights.L_RF": 10.0, "seed": 7}))
    assert cfg.training.loss_weights == {"L_RF": 10.0}
    assert cfg.training.seed == 7


def test_fd_schedule_defaults_to_t_max():
    """Without an explicit end time the simulation runs to t_max."""
    cfg = parse_experiment(_minimal(**{"fd.schedule.report_times_min": [1.0, 2.0]}))
    assert cfg.fd.schedule.t_end == pytest.approx(36000.0)
    assert cfg.fd.schedule.report_times == pytest.approx((60.0, 120.0))


def test_observation_paths_resolved():
    """Observation paths are relative to the config file."""
    cfg = parse_experiment(_minimal(**{"observations.rf": "data/rf.csv"}), base=Path("/work/exp"))
    assert cfg.observations.rf == Path("/work/exp/data/rf.csv")
    assert cfg.observations.rate is None
    assert not cfg.observations.is_empty


def test_load_experiment_file():
    """Files carry their source path and content hash."""
    with tempfile.TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "exp.toml"
        path.write_text((CONFIGS / "benchmark2d.toml").read_text())
        cfg = load_experiment(path)
    assert cfg.source == path
    assert len(cfg.sha256) == 64
    assert cfg.problem.p_in == pytest.approx(530 * PSI_TO_PA)


def test_load_experiment_errors():
    """Missing files and TOML syntax errors are configuration errors."""
    with tempfile.TemporaryDirectory() as tmpdir:
        with pytest.raises(ConfigurationError):
            load_experiment(Path(tmpdir) / "missing.toml")
        bad = Path(tmpdir) / "bad.toml"
        bad.write_text("[problem\nshape = 1\n")
        with pytest.raises(ConfigurationError):
            load_experiment(bad)


def test_benchmark_configs_build():
    """Both shipped benchmarks load into valid problems with fractures."""
    cfg = load_experiment(CONFIGS / "benchmark2d.toml")
    problem = build_problem(cfg)
    assert problem.geometry.is_slab
    assert len(problem.fractures.fractures) == 2
    assert problem.fracture.permeability == pytest.approx(0.0199 * MD_TO_M2)
    assert "J1" in cfg.training.inverse

    cfg3 = load_experiment(CONFIGS / "benchmark3d.toml")
    assert not build_problem(cfg3).geometry.is_slab


def test_benchmark3d_inverts_full_parameter_set():
    """The 3D benchmark estimates every closure parameter plus the fracture permeability."""
    cfg = load_experiment(CONFIGS / "benchmark3d.toml")
    assert cfg.training.inverse == DEFAULT_INVERSE


def test_build_collocation_set():
    """The collocation builder follows the configured resolution and seed."""
    cfg = parse_experiment(_minimal(**{
        "collocation.resolution": [6, 10, 1],
        "collocation.n_face": 5,
        "collocation.n_radial": 5,
        "collocation.time_count": 10,
    }))
    problem = build_problem(cfg)
    colloc = build_collocation_set(cfg, problem)
    assert colloc.resolution == (6, 10, 1)
    assert len(colloc[Tag.INLET]) > 0
    assert colloc.n_fracture == 0
