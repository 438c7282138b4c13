"""Voxel snapshot files: a short text header followed by raw float64 values."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np

from fracflow.io.exceptions import InvalidMagicError, PayloadSizeError, VoxelFormatError

logger = logging.getLogger(__name__)

MAGIC = b"FRACFLOW-VOX1"
END = b"end"
DTYPE = np.dtype("<f8")
# Header lines after the magic, in order
HEADER_KEYS = ("dims", "spacing", "time", "name")
MAX_HEADER_LINE = 256


@dataclass(frozen=True, eq=False)
class VoxelFile:
    """One saturation (or other scalar) snapshot on a regular lattice."""

    values: np.ndarray
    spacing: tuple[float, float, float]
    time: float = 0.0
    name: str = "sw"

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(n) for n in self.values.shape)


def _header_line(file: BinaryIO, key: str) -> list[str]:
    line = file.readline(MAX_HEADER_LINE)
    if not line.endswith(b"\n"):
        raise VoxelFormatError(f"truncated header while reading '{key}'")
    parts = line.decode("ascii", errors="replace").split()
    if not parts or parts[0] != key:
        raise VoxelFormatError(f"expected header field '{key}', got {line!r}")
    return parts[1:]


def parse_voxel(file: BinaryIO) -> VoxelFile:
    """Parse a voxel file from a binary stream.

    Raises:
        InvalidMagicError: If the first line is not the magic string
        VoxelFormatError: If a header line is malformed
        PayloadSizeError: If the payload does not hold nx*ny*nz values
    """
    first = file.readline(MAX_HEADER_LINE).rstrip(b"\n")
    if first != MAGIC:
        raise InvalidMagicError(f"Invalid magic: {first[:32]!r}, expected {MAGIC!r}")

    try:
        dims = tuple(int(v) for v in _header_line(file, "dims"))
        spacing = tuple(float(v) for v in _header_line(file, "spacing"))
        (time,) = (float(v) for v in _header_line(file, "time"))
        name_parts = _header_line(file, "name")
    except ValueError as e:
        raise VoxelFormatError(f"malformed header value: {e}") from e
    if len(dims) != 3 or any(n < 1 for n in dims):
        raise VoxelFormatError(f"dims must be three positive integers, got {dims}")
    if len(spacing) != 3 or any(not s > 0.0 for s in spacing):
        raise VoxelFormatError(f"spacing must be three positive numbers, got {spacing}")
    if len(name_parts) != 1:
        raise VoxelFormatError(f"name must be a single token, got {name_parts}")
    if file.readline(MAX_HEADER_LINE).rstrip(b"\n") != END:
        raise VoxelFormatError("header is not terminated by 'end'")

    expected = int(np.prod(dims)) * DTYPE.itemsize
    payload = file.read()
    if len(payload) != expected:
        raise PayloadSizeError(f"payload is {len(payload)} bytes, expected {expected} for dims {dims}")
    values = np.frombuffer(payload, dtype=DTYPE).reshape(dims).astype(float)
    return VoxelFile(values=values, spacing=spacing, time=time, name=name_parts[0])


def read_voxel(path: Path) -> VoxelFile:
    """Read a voxel file from disk."""
    with open(path, "rb") as f:
        return parse_voxel(f)


def _build_header(v: VoxelFile) -> bytes:
    nx, ny, nz = v.dims
    dx, dy, dz = v.spacing
    lines = [
        MAGIC.decode(),
        f"dims {nx} {ny} {nz}",
        f"spacing {dx!r} {dy!r} {dz!r}",
        f"time {float(v.time)!r}",
        f"name {v.name}",
        END.decode(),
    ]
    return ("\n".join(lines) + "\n").encode("ascii")


def write_voxel(path: Path, v: VoxelFile) -> Path:
    """Write a voxel file; values are stored row-major as little-endian float64."""
    values = np.asarray(v.values, dtype=float)
    if values.ndim != 3:
        raise VoxelFormatError(f"voxel values must be 3D, got shape {values.shape}")
    if not v.name or any(c.isspace() for c in v.name):
        raise VoxelFormatError(f"voxel name must be one non-empty token, got {v.name!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_build_header(v))
        f.write(np.ascontiguousarray(values, dtype=DTYPE).tobytes(order="C"))
    logger.debug(f"Wrote voxel file {path} ({v.dims})")
    return path
