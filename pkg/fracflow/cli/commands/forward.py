"""forward-fd and forward-pinn command implementations."""

import csv
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from fracflow.cli.output import console, create_progress, format_seconds, print_success
from fracflow.cli.runner import guarded, start_run
from fracflow.config import build_collocation_set, build_networks, build_problem
from fracflow.fdsim import SimSchedule, build_grid, simulate
from fracflow.geometry import Tag
from fracflow.io import ObservationBundle, VoxelFile, write_observations, write_rf_csv, write_voxel
from fracflow.pinn import predict_fields, predict_rf, train, write_history_csv

STEP_COLUMNS = (
    "t", "dt", "substeps", "water_balance_error", "transfer_imbalance", "clamp_violation", "upwind_iterations",
)


def _report_times(schedule: SimSchedule, t_end: float) -> tuple[float, ...]:
    times = {t for t in schedule.report_times if 0.0 <= t <= t_end}
    return tuple(sorted(times | {0.0, t_end}))


def run_forward_fd(
    config: Path,
    output: Path,
    t_end: float | None = None,
    resolution: tuple[int, int, int] | None = None,
    debug: bool = False,
):
    """Run the reference simulator and write a synthetic observation bundle."""
    with guarded("forward-fd"):
        ctx = start_run("forward-fd", output, config, debug, inputs={"t_end": t_end, "resolution": resolution})
        cfg = ctx.config
        problem = build_problem(cfg)
        grid = build_grid(problem, resolution or cfg.fd.resolution)
        schedule = cfg.fd.schedule or SimSchedule(t_end=problem.t_max)
        if t_end is not None:
            schedule = replace(schedule, t_end=t_end)
        schedule = replace(schedule, report_times=_report_times(schedule, schedule.t_end))

        with console.status(f"Simulating {format_seconds(schedule.t_end)} on {grid.shape} cells..."):
            result = simulate(problem, grid, schedule)

        snapshots = [
            VoxelFile(values=sw, spacing=grid.spacing, time=float(t), name="sw")
            for t, sw in zip(result.snapshot_times, result.sw_snapshots)
        ]
        bundle = ObservationBundle(
            rf_times=result.times, rf_values=result.rf,
            q_times=result.times, q_values=result.q_inj,
            snapshots=snapshots,
        )
        write_observations(ctx.path("observations"), bundle)
        for i, (t, p) in enumerate(zip(result.snapshot_times, result.p_snapshots)):
            write_voxel(ctx.path(f"pressure/p_{i:03d}.vox"), VoxelFile(p, grid.spacing, float(t), "p_nw"))

        with open(ctx.path("steps.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(STEP_COLUMNS)
            for report in result.reports:
                row = asdict(report)
                writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in STEP_COLUMNS])

        worst = max((r.water_balance_error for r in result.reports), default=0.0)
        console.print(f"Final RF: {result.rf[-1]:.4f}   worst water balance error: {worst:.2e}")
        print_success(f"Wrote {len(snapshots)} snapshots to {ctx.path('observations')}")


def run_forward_pinn(config: Path, output: Path, debug: bool = False):
    """Train the forward networks and write history, checkpoint and predictions."""
    with guarded("forward-pinn"):
        ctx = start_run("forward-pinn", output, config, debug)
        cfg = ctx.config
        problem = build_problem(cfg)
        colloc = build_collocation_set(cfg, problem)
        nets = build_networks(cfg, problem)
        training = replace(cfg.training, inverse=())

        with create_progress() as progress:
            task = progress.add_task("Training", total=max(training.total_epochs, 1))
            result = train(
                problem, nets, colloc, training,
                checkpoint_path=ctx.path("checkpoint.pt"),
                progress_callback=lambda cur, tot, stage: progress.update(
                    task, completed=cur, description=f"Training [{stage}]"
                ),
            )

        write_history_csv(ctx.path("history.csv"), result.history)
        times = np.linspace(0.0, problem.t_max, 51)
        write_rf_csv(ctx.path("rf_pinn.csv"), times, predict_rf(result.nets, problem, colloc[Tag.MATRIX], times))

        schedule = cfg.fd.schedule or SimSchedule(t_end=problem.t_max)
        resolution = cfg.fd.resolution
        spacing = problem.geometry.lattice_spacing(resolution)
        for i, t in enumerate(_report_times(schedule, min(schedule.t_end, problem.t_max))):
            sw, _ = predict_fields(result.nets, problem, resolution, t)
            write_voxel(ctx.path(f"predictions/sw_{i:03d}.vox"), VoxelFile(sw, spacing, t, "sw"))

        console.print(f"Final total loss: {result.final_loss:.4e} after {result.epochs_run} epochs")
        print_success(f"Wrote {ctx.path('history.csv')}")
