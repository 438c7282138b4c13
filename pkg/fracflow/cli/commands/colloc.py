"""gen-colloc command implementation."""

from pathlib import Path

from rich.table import Table

from fracflow.cli.output import console, print_success
from fracflow.cli.runner import guarded, start_run
from fracflow.config import build_collocation_set, build_problem
from fracflow.geometry import check_invariants, inlet_areas, write_collocation_csv, write_fracture_csv


def run_gen_colloc(config: Path, output: Path, debug: bool = False):
    """Build the collocation set and write it with the fracture cloud."""
    with guarded("gen-colloc"):
        ctx = start_run("gen-colloc", output, config, debug)
        problem = build_problem(ctx.config)
        colloc = build_collocation_set(ctx.config, problem)
        check_invariants(colloc)

        write_collocation_csv(ctx.path("collocation.csv"), colloc)
        write_fracture_csv(ctx.path("fractures.csv"), problem.fractures)
        a_m, a_f = inlet_areas(problem.geometry, problem.fractures)

        table = Table(title="Collocation Points")
        table.add_column("Tag", style="cyan")
        table.add_column("Count", justify="right")
        for tag, count in colloc.counts().items():
            table.add_row(tag, str(count))
        console.print(table)
        console.print(f"Inlet area: matrix {a_m:.4e} m², fracture {a_f:.4e} m²")
        print_success(f"Wrote {ctx.path('collocation.csv')}")
