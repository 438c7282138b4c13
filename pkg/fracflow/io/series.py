"""Time-series CSV files for recovery factor and injection rate."""

import csv
from pathlib import Path

import numpy as np

from fracflow.io.exceptions import ObservationError

RF_COLUMNS = ("t_s", "rf")
RATE_COLUMNS = ("t_s", "q_m3_per_s")


def write_series_csv(path: Path, columns: tuple[str, str], times, values) -> Path:
    """Write two aligned columns with full float precision."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ObservationError(f"{path}: {len(times)} times but {len(values)} values")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for t, v in zip(times, values):
            writer.writerow([repr(float(t)), repr(float(v))])
    return path


def read_series_csv(path: Path, columns: tuple[str, str]) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column series, checking the header and strictly increasing times.

    Raises:
        ObservationError: If the header, a row or the time ordering is bad
    """
    times: list[float] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != columns:
            raise ObservationError(f"{path}: expected header {','.join(columns)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t, v = float(row[0]), float(row[1])
            except (ValueError, IndexError) as e:
                raise ObservationError(f"{path}:{lineno}: {e}") from e
            if times and t <= times[-1]:
                raise ObservationError(f"{path}:{lineno}: time {t} is not after {times[-1]}")
            times.append(t)
            values.append(v)
    return np.asarray(times), np.asarray(values)


def write_rf_csv(path: Path, times, rf) -> Path:
    return write_series_csv(path, RF_COLUMNS, times, rf)


def read_rf_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``t_s,rf``; every rf must lie in [0, 1]."""
    times, rf = read_series_csv(path, RF_COLUMNS)
    bad = (rf < 0.0) | (rf > 1.0) | ~np.isfinite(rf)
    if bad.any():
        raise ObservationError(f"{path}: rf value {rf[np.argmax(bad)]} outside [0, 1]")
    return times, rf


def write_rate_csv(path: Path, times, q) -> Path:
    return write_series_csv(path, RATE_COLUMNS, times, q)


def read_rate_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    times, q = read_series_csv(path, RATE_COLUMNS)
    if not np.all(np.isfinite(q)):
        raise ObservationError(f"{path}: non-finite injection rate")
    return times, q
