"""curves and bl command implementations."""

import csv
from pathlib import Path

import numpy as np

from fracflow.cli.output import console, parameters_table, print_success
from fracflow.cli.runner import guarded, start_run
from fracflow.closure import lambda_area, write_curves_csv
from fracflow.config import build_problem
from fracflow.fdsim import bl_profile, shock_position, total_velocity, welge_shock

BL_COLUMNS = ("y_m", "t_s", "sw")


def run_curves(config: Path, output: Path, points: int = 1001, debug: bool = False):
    """Export matrix and fracture closure curves."""
    with guarded("curves"):
        ctx = start_run("curves", output, config, debug, inputs={"points": points})
        problem = build_problem(ctx.config)
        write_curves_csv(ctx.path("curves.csv"), problem.matrix, problem.fluids, points)
        write_curves_csv(ctx.path("fracture_curves.csv"), problem.fracture, problem.fluids, points)
        console.print(f"Lambda area (matrix): {lambda_area(problem.matrix, problem.fluids):.6g}")
        print_success(f"Wrote {ctx.path('curves.csv')} ({points} rows)")


def run_bl(config: Path, output: Path, points: int = 201, debug: bool = False):
    """Buckley-Leverett profiles along the fracture at the FD report times."""
    with guarded("bl"):
        ctx = start_run("bl", output, config, debug, inputs={"points": points})
        problem = build_problem(ctx.config)
        f, fl = problem.fracture, problem.fluids
        u_t = total_velocity(f, f.permeability, fl.mu_w, problem.pressure_drop, problem.geometry.length)
        shock = welge_shock(f, fl)

        schedule = ctx.config.fd.schedule
        times = [t for t in (schedule.report_times if schedule else ()) if t > 0.0]
        if not times:
            times = list(np.linspace(0.0, problem.t_max, 6)[1:])
        y = np.linspace(0.0, problem.geometry.length, points)

        with open(ctx.path("bl.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(BL_COLUMNS)
            for t in times:
                sw = bl_profile(f, fl, u_t, f.porosity, t, y)
                for yi, si in zip(y, sw):
                    writer.writerow([repr(float(yi)), repr(float(t)), repr(float(si))])

        console.print(parameters_table("Welge Shock", {"value": {
            "S_shock": shock.saturation,
            "fw_shock": shock.fw,
            "speed": shock.speed,
            "u_t_m_per_s": u_t,
            f"x_front_m@{times[-1]:.4g}s": shock_position(f, fl, u_t, f.porosity, times[-1]),
        }}))
        print_success(f"Wrote {ctx.path('bl.csv')}")
