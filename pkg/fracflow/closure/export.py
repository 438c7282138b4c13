"""Tabulated closure curves and their CSV export."""

import csv
from pathlib import Path

import numpy as np

from fracflow.closure.curves import (
    capillary_pressure,
    cdc_lambda,
    clamp_open,
    detach_closure,
    fractional_flow,
    leverett_j,
    rel_perm,
)
from fracflow.closure.params import FluidProps, SaturationFunctions

CURVE_COLUMNS = ("Sw", "krw", "krnw", "J", "pc_Pa", "fw", "lambda")


def curve_table(f: SaturationFunctions, fl: FluidProps, n: int = 1001) -> dict[str, np.ndarray]:
    """Evaluate every closure curve on a uniform normalized-saturation grid.

    kr and f_w use the exact grid including both endpoints; J, pc and the
    CDC curve are evaluated at the clamped saturation.
    """
    f = detach_closure(f)
    S = np.linspace(0.0, 1.0, n)
    S_open = clamp_open(S)
    krw, krnw = rel_perm(S, f.corey)
    return {
        "Sw": S,
        "krw": np.asarray(krw, dtype=float),
        "krnw": np.asarray(krnw, dtype=float),
        "J": np.asarray(leverett_j(S_open, f.leverett), dtype=float),
        "pc_Pa": np.asarray(capillary_pressure(S_open, f), dtype=float),
        "fw": np.asarray(fractional_flow(S, f, fl), dtype=float),
        "lambda": np.asarray(cdc_lambda(S_open, f, fl), dtype=float),
    }


def write_curves_csv(path: Path, f: SaturationFunctions, fl: FluidProps, n: int = 1001) -> Path:
    """Write the closure curves as ``Sw,krw,krnw,J,pc_Pa,fw,lambda``."""
    table = curve_table(f, fl, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for i in range(n):
            writer.writerow([repr(float(table[c][i])) for c in CURVE_COLUMNS])
    return path
