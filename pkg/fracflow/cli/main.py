"""fracflow CLI main entry point."""

from pathlib import Path

import click

CONFIG = click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
OUTPUT = click.option(
    "--output", "-o",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("runs"),
    show_default=True,
    help="Output directory",
)
DEBUG = click.option("--debug", is_flag=True, help="Verbose console logging")
TRUTH = click.option("--truth", is_flag=True, help="Score fitted curves against the configured closure")


@click.group()
@click.version_option(package_name="fracflow")
def cli():
    """fracflow: two-phase flow in fractured cores.

    Physics-informed and finite-difference tools for water/CO2 displacement
    and closure curve estimation.
    """
    pass


@cli.command("gen-colloc")
@CONFIG
@OUTPUT
@DEBUG
def gen_colloc(config: Path, output: Path, debug: bool):
    """Sample collocation points and the fracture cloud."""
    from fracflow.cli.commands.colloc import run_gen_colloc
    run_gen_colloc(config, output, debug=debug)


@cli.command()
@CONFIG
@OUTPUT
@click.option("--points", default=1001, show_default=True, type=click.IntRange(min=2), help="Saturation grid size")
@DEBUG
def curves(config: Path, output: Path, points: int, debug: bool):
    """Export closure curves (kr, pc, fw, lambda)."""
    from fracflow.cli.commands.closure import run_curves
    run_curves(config, output, points=points, debug=debug)


@cli.command()
@CONFIG
@OUTPUT
@click.option("--points", default=201, show_default=True, type=click.IntRange(min=2), help="Points along the core")
@DEBUG
def bl(config: Path, output: Path, points: int, debug: bool):
    """Buckley-Leverett profiles along the fracture."""
    from fracflow.cli.commands.closure import run_bl
    run_bl(config, output, points=points, debug=debug)


@cli.command("forward-fd")
@CONFIG
@OUTPUT
@click.option("--t-end", type=float, help="End time in seconds (overrides the config)")
@click.option("--resolution", nargs=3, type=int, help="Grid cells nx ny nz (overrides the config)")
@DEBUG
def forward_fd(config: Path, output: Path, t_end: float | None, resolution: tuple[int, int, int], debug: bool):
    """Run the finite-difference reference simulator."""
    from fracflow.cli.commands.forward import run_forward_fd
    run_forward_fd(config, output, t_end=t_end, resolution=resolution or None, debug=debug)


@cli.command("forward-pinn")
@CONFIG
@OUTPUT
@DEBUG
def forward_pinn(config: Path, output: Path, debug: bool):
    """Train the forward networks with known closure parameters."""
    from fracflow.cli.commands.forward import run_forward_pinn
    run_forward_pinn(config, output, debug=debug)


@cli.command("invert-pinn")
@CONFIG
@OUTPUT
@TRUTH
@DEBUG
def invert_pinn(config: Path, output: Path, truth: bool, debug: bool):
    """Estimate closure parameters from observations with the networks."""
    from fracflow.cli.commands.inverse import run_invert_pinn
    run_invert_pinn(config, output, truth=truth, debug=debug)


@cli.command("invert-fd-nm")
@CONFIG
@OUTPUT
@TRUTH
@DEBUG
def invert_fd_nm(config: Path, output: Path, truth: bool, debug: bool):
    """History-match RF with the simulator and a Nelder-Mead search."""
    from fracflow.cli.commands.inverse import run_invert_fd_nm
    run_invert_fd_nm(config, output, truth=truth, debug=debug)


@cli.command()
@CONFIG
@OUTPUT
@click.option("--seeds", type=click.IntRange(min=1), help="Number of seeds (overrides the config)")
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes (overrides the config)")
@TRUTH
@DEBUG
def ensemble(config: Path, output: Path, seeds: int | None, workers: int | None, truth: bool, debug: bool):
    """Repeat the inverse run over randomized starting values."""
    from fracflow.cli.commands.inverse import run_ensemble
    run_ensemble(config, output, seeds=seeds, workers=workers, truth=truth, debug=debug)


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("output_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--cylinder-axis", type=click.IntRange(0, 2), help="Only filter inside the cylinder along this axis")
@DEBUG
def denoise(input_path: Path, output_path: Path, cylinder_axis: int | None, debug: bool):
    """Kriging-filter a voxel file."""
    from fracflow.cli.commands.voxels import run_denoise
    run_denoise(input_path, output_path, cylinder_axis=cylinder_axis, debug=debug)


@cli.command("add-noise")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("output_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--sigma", default=0.05, show_default=True, type=click.FloatRange(min=0.0), help="Noise standard deviation")
@click.option("--seed", default=0, show_default=True, type=int, help="Random seed")
@click.option("--no-clip", is_flag=True, help="Do not clip values to [0, 1]")
@DEBUG
def add_noise(input_path: Path, output_path: Path, sigma: float, seed: int, no_clip: bool, debug: bool):
    """Add Gaussian noise to a voxel file."""
    from fracflow.cli.commands.voxels import run_add_noise
    run_add_noise(input_path, output_path, sigma, seed=seed, clip=None if no_clip else (0.0, 1.0), debug=debug)


if __name__ == "__main__":
    cli()
