"""invert-pinn, invert-fd-nm and ensemble command implementations."""

import csv
import json
from pathlib import Path

import numpy as np

from fracflow.cli.output import console, create_progress, parameters_table, print_success, print_warning
from fracflow.cli.runner import guarded, start_run
from fracflow.closure import curve_table, lambda_area, write_curves_csv
from fracflow.config import (
    ExperimentConfig,
    build_collocation_set,
    build_networks,
    build_problem,
    load_experiment_observations,
)
from fracflow.exceptions import ConfigurationError
from fracflow.fdsim import histmatch_fd
from fracflow.io import ObservationBundle
from fracflow.pinn import (
    build_inverse_set,
    ensemble_invert,
    nmae,
    train,
    write_history_csv,
)
from fracflow.problem import FlowProblem, parameter_values, with_parameters


def _inverse_names(cfg: ExperimentConfig) -> tuple[str, ...]:
    if not cfg.training.inverse:
        raise ConfigurationError("training.inverse must name at least one parameter to estimate")
    return cfg.training.inverse


def _require(bundle: ObservationBundle) -> ObservationBundle:
    if bundle.is_empty:
        raise ConfigurationError("inverse runs need observations; set [observations] in the config")
    return bundle


def _curve_errors(fitted: FlowProblem, truth: FlowProblem) -> dict[str, float]:
    a = curve_table(fitted.matrix, fitted.fluids)
    b = curve_table(truth.matrix, truth.fluids)
    return {name: nmae(a[column], b[column]) for name, column in (
        ("lambda", "lambda"), ("pc", "pc_Pa"), ("krw", "krw"), ("krnw", "krnw"),
    )}


def _write_json(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_invert_pinn(config: Path, output: Path, truth: bool = False, debug: bool = False):
    """Estimate closure parameters by training against the observations."""
    with guarded("invert-pinn"):
        ctx = start_run("invert-pinn", output, config, debug, inputs={"truth": truth})
        cfg = ctx.config
        problem = build_problem(cfg)
        names = _inverse_names(cfg)
        observations = _require(load_experiment_observations(cfg, problem))
        colloc = build_collocation_set(cfg, problem)
        nets = build_networks(cfg, problem)
        rng = np.random.default_rng(cfg.seed)
        inverse = build_inverse_set(problem, names, rng, cfg.training.kappa, cfg.training.xi_m)
        initial = inverse.floats()

        with create_progress() as progress:
            task = progress.add_task("Inverting", total=max(cfg.training.total_epochs, 1))
            result = train(
                problem, nets, colloc, cfg.training,
                observations=observations,
                inverse=inverse,
                checkpoint_path=ctx.path("checkpoint.pt"),
                progress_callback=lambda cur, tot, stage: progress.update(
                    task, completed=cur, description=f"Inverting [{stage}]"
                ),
            )

        fitted = with_parameters(problem, result.parameters())
        write_history_csv(ctx.path("history.csv"), result.history)
        write_curves_csv(ctx.path("curves_fitted.csv"), fitted.matrix, fitted.fluids)
        report = {
            "parameters": result.parameters(),
            "initial": initial,
            "lambda_bar": lambda_area(fitted.matrix, fitted.fluids),
            "final_loss": result.final_loss,
            "epochs": result.epochs_run,
        }
        columns = {"initial": initial, "fitted": result.parameters()}
        if truth:
            report["truth"] = parameter_values(problem, names)
            report["nmae"] = _curve_errors(fitted, problem)
            columns["truth"] = report["truth"]
        _write_json(ctx.path("inverse.json"), report)

        console.print(parameters_table("Inverse Parameters", columns))
        if truth:
            console.print(f"Lambda NMAE vs truth: {report['nmae']['lambda']:.4f}")
        print_success(f"Wrote {ctx.path('inverse.json')}")


def run_invert_fd_nm(config: Path, output: Path, truth: bool = False, debug: bool = False):
    """History-match the RF series with the reference simulator and a simplex search."""
    with guarded("invert-fd-nm"):
        ctx = start_run("invert-fd-nm", output, config, debug, inputs={"truth": truth})
        cfg = ctx.config
        problem = build_problem(cfg)
        names = _inverse_names(cfg)
        observations = _require(load_experiment_observations(cfg, problem))
        if len(observations.rf_times) == 0:
            raise ConfigurationError("invert-fd-nm matches RF only; set observations.rf")

        rng = np.random.default_rng(cfg.seed)
        start = build_inverse_set(problem, names, rng, cfg.training.kappa, cfg.training.xi_m).floats()
        with console.status("History matching..."):
            result = histmatch_fd(
                problem,
                cfg.fd.resolution,
                observations.rf_times,
                observations.rf_values,
                start,
                options=cfg.fd.histmatch,
                schedule=cfg.fd.schedule,
            )

        fitted = with_parameters(problem, result.parameters)
        write_curves_csv(ctx.path("curves_fitted.csv"), fitted.matrix, fitted.fluids)
        with open(ctx.path("evaluations.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*names, "objective"])
            for row in result.evaluations:
                writer.writerow([repr(float(row[k])) for k in (*names, "objective")])
        report = {
            "parameters": result.parameters,
            "initial": start,
            "objective": result.objective,
            "status": result.optimizer.status,
            "iterations": result.optimizer.n_iter,
            "evaluations": result.optimizer.n_evals,
            "failures": result.failures,
            "trace": result.optimizer.trace,
            "lambda_bar": lambda_area(fitted.matrix, fitted.fluids),
        }
        if truth:
            report["nmae"] = _curve_errors(fitted, problem)
        _write_json(ctx.path("histmatch.json"), report)

        console.print(parameters_table("History Match", {"initial": start, "fitted": result.parameters}))
        if result.failures:
            print_warning(f"{result.failures} candidates failed and were penalized")
        print_success(f"Wrote {ctx.path('histmatch.json')}")


def run_ensemble(
    config: Path,
    output: Path,
    seeds: int | None = None,
    workers: int | None = None,
    truth: bool = False,
    debug: bool = False,
):
    """Repeat the inverse run over independently randomized starting values."""
    with guarded("ensemble"):
        ctx = start_run("ensemble", output, config, debug, inputs={"seeds": seeds, "workers": workers, "truth": truth})
        cfg = ctx.config
        problem = build_problem(cfg)
        _inverse_names(cfg)
        observations = _require(load_experiment_observations(cfg, problem))
        colloc = build_collocation_set(cfg, problem)
        nc = cfg.network

        with console.status("Running ensemble..."):
            report = ensemble_invert(
                problem,
                colloc,
                cfg.training,
                seeds or cfg.ensemble.n_seeds,
                observations=observations,
                truth=problem if truth else None,
                max_workers=workers or cfg.ensemble.max_workers,
                net_kwargs={
                    "matrix_cfg": nc.matrix,
                    "fracture_cfg": nc.fracture,
                    "weight_cfg": nc.weight,
                    "fourier_saturation": nc.fourier_saturation,
                },
            )

        _write_json(ctx.path("ensemble.json"), report.to_dict())
        for r in report.seeds:
            fitted = with_parameters(problem, r.parameters)
            write_curves_csv(ctx.path(f"curves/seed_{r.seed:03d}.csv"), fitted.matrix, fitted.fluids)

        failed = [r.seed for r in report.seeds if not r.ok]
        console.print(parameters_table("Cross-seed Dispersion (mean pairwise NMAE)", {"dispersion": report.dispersion}))
        if report.mean_nmae:
            console.print(parameters_table("Mean NMAE vs Truth", {"nmae": report.mean_nmae}))
        if failed:
            print_warning(f"Seeds {failed} failed")
        print_success(f"Wrote {ctx.path('ensemble.json')}")
