"""Tests for the fracflow command line."""

import csv
import json
import tempfile
from pathlib import Path

import numpy as np
from click.testing import CliRunner

from fracflow.cli.main import cli
from fracflow.cli.runner import MANIFEST_FILE, exit_code_for
from fracflow.exceptions import ConfigurationError, FracFlowError
from fracflow.fdsim import SingularSystemError, TimeStepUnderflowError
from fracflow.io import VoxelFile, read_voxel, write_voxel
from fracflow.pinn import DivergenceError, NonFiniteResidualError

CONFIGS = Path(__file__).parents[2] / "configs"
BENCHMARK = CONFIGS / "benchmark2d.toml"


def _rows(path: Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_exit_codes():
    """Each error family should map to its own exit status."""
    assert exit_code_for(ConfigurationError("x")) == 2
    assert exit_code_for(DivergenceError("x")) == 3
    assert exit_code_for(SingularSystemError("x")) == 4
    assert exit_code_for(TimeStepUnderflowError("x")) == 5
    assert exit_code_for(NonFiniteResidualError("x")) == 6
    assert exit_code_for(FracFlowError("x")) == 1
    assert exit_code_for(ValueError("x")) == 1


def test_help_lists_commands():
    """The group help should list every command."""
    result = CliRunner().invoke(cli, ["--help"])
    assert result.exit_code == 0
    for name in ("gen-colloc", "curves", "bl", "forward-fd", "forward-pinn",
                 "invert-pinn", "invert-fd-nm", "ensemble", "denoise", "add-noise"):
        assert name in result.output


def test_curves_writes_tables_and_manifest():
    """curves should write both curve tables and a manifest."""
    with tempfile.TemporaryDirectory() as tmpdir:
        out = Path(tmpdir) / "run"
        result = CliRunner().invoke(cli, ["curves", str(BENCHMARK), "-o", str(out), "--points", "11"])
        assert result.exit_code == 0, result.output

        rows = _rows(out / "curves.csv")
        assert rows[0] == ["Sw", "krw", "krnw", "J", "pc_Pa", "fw", "lambda"]
        assert len(rows) == 12
        assert (out / "fracture_curves.csv").exists()

        manifest = json.loads((out / MANIFEST_FILE).read_text())
        assert manifest["command"] == "curves"
        assert manifest["seed"] == 0
        assert len(manifest["config_sha256"]) == 64
        assert (out / "run.log").exists()


def test_bl_profiles_per_report_time():
    """bl should write one profile per configured report time."""
    with tempfile.TemporaryDirectory() as tmpdir:
        out = Path(tmpdir)
        result = CliRunner().invoke(cli, ["bl", str(BENCHMARK), "-o", str(out), "--points", "5"])
        assert result.exit_code == 0, result.output

        rows = _rows(out / "bl.csv")
        assert rows[0] == ["y_m", "t_s", "sw"]
        assert len(rows) == 1 + 6 * 5
        assert all(0.0 <= float(r[2]) <= 1.0 for r in rows[1:])


def test_gen_colloc_writes_point_files():
    """gen-colloc should write the collocation and fracture clouds."""
    text = BENCHMARK.read_text().replace("time_count = 100", "time_count = 4").replace(
        "[collocation]\nresolution = [40, 80, 1]", "[collocation]\nresolution = [8, 16, 1]"
    )
    with tempfile.TemporaryDirectory() as tmpdir:
        small = Path(tmpdir) / "small.toml"
        small.write_text(text)
        out = Path(tmpdir) / "run"
        result = CliRunner().invoke(cli, ["gen-colloc", str(small), "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert len(_rows(out / "collocation.csv")) > 1
        assert len(_rows(out / "fractures.csv")) > 1


def test_forward_fd_short_run():
    """forward-fd should write observations and a step log for a short run."""
    with tempfile.TemporaryDirectory() as tmpdir:
        out = Path(tmpdir)
        result = CliRunner().invoke(
            cli, ["forward-fd", str(BENCHMARK), "-o", str(out), "--t-end", "100", "--resolution", "4", "8", "1"]
        )
        assert result.exit_code == 0, result.output
        assert (out / "observations").is_dir()
        rows = _rows(out / "steps.csv")
        assert rows[0][0] == "t"
        assert len(rows) > 1


def test_bad_config_exits_with_configuration_code():
    """An unknown config key should exit with status 2."""
    with tempfile.TemporaryDirectory() as tmpdir:
        bad = Path(tmpdir) / "bad.toml"
        bad.write_text(BENCHMARK.read_text() + "\n[unexpected]\nvalue = 1\n")
        result = CliRunner().invoke(cli, ["curves", str(bad), "-o", str(Path(tmpdir) / "out")])
        assert result.exit_code == 2


def test_denoise_writes_output_and_sidecar():
    """denoise should smooth the voxel file and record its input hash."""
    rng = np.random.default_rng(0)
    with tempfile.TemporaryDirectory() as tmpdir:
        src = Path(tmpdir) / "sw.vox"
        dst = Path(tmpdir) / "sw_smooth.vox"
        write_voxel(src, VoxelFile(rng.uniform(size=(10, 10, 10)), (1e-3, 1e-3, 1e-3), 50.0, "sw"))

        result = CliRunner().invoke(cli, ["denoise", str(src), str(dst), "--cylinder-axis", "2"])
        assert result.exit_code == 0, result.output

        out = read_voxel(dst)
        assert out.dims == (10, 10, 10)
        assert out.time == 50.0
        sidecar = json.loads((Path(tmpdir) / "sw_smooth.vox.json").read_text())
        assert sidecar["command"] == "denoise"
        assert sidecar["inputs"]["cylinder_axis"] == 2
        assert len(sidecar["inputs"]["input_sha256"]) == 64


def test_add_noise_clips_and_keeps_invalid_voxels():
    """add-noise should stay inside [0, 1] and leave NaN voxels alone."""
    values = np.full((6, 6, 6), 0.5)
    values[0, 0, 0] = np.nan
    with tempfile.TemporaryDirectory() as tmpdir:
        src = Path(tmpdir) / "sw.vox"
        dst = Path(tmpdir) / "sw_noisy.vox"
        write_voxel(src, VoxelFile(values, (1e-3, 1e-3, 1e-3), 0.0, "sw"))

        result = CliRunner().invoke(cli, ["add-noise", str(src), str(dst), "--sigma", "0.3", "--seed", "4"])
        assert result.exit_code == 0, result.output

        noisy = read_voxel(dst).values
        assert np.isnan(noisy[0, 0, 0])
        finite = noisy[np.isfinite(noisy)]
        assert finite.min() >= 0.0 and finite.max() <= 1.0
        assert not np.allclose(finite, 0.5)
        sidecar = json.loads((Path(tmpdir) / "sw_noisy.vox.json").read_text())
        assert sidecar["seed"] == 4
