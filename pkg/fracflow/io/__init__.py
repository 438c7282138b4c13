"""fracflow io - voxel snapshot codec, series CSVs and observation bundles."""

from fracflow.io.exceptions import (
    VoxelFormatError,
    InvalidMagicError,
    PayloadSizeError,
    ObservationError,
)
from fracflow.io.voxel import MAGIC, VoxelFile, parse_voxel, read_voxel, write_voxel
from fracflow.io.series import (
    RF_COLUMNS,
    RATE_COLUMNS,
    read_rf_csv,
    write_rf_csv,
    read_rate_csv,
    write_rate_csv,
)
from fracflow.io.observations import (
    ObservationBundle,
    snapshot_points,
    load_observations,
    write_observations,
    load_observation_dir,
)

__all__ = [
    "VoxelFormatError",
    "InvalidMagicError",
    "PayloadSizeError",
    "ObservationError",
    "MAGIC",
    "VoxelFile",
    "parse_voxel",
    "read_voxel",
    "write_voxel",
    "RF_COLUMNS",
    "RATE_COLUMNS",
    "read_rf_csv",
    "write_rf_csv",
    "read_rate_csv",
    "write_rate_csv",
    "ObservationBundle",
    "snapshot_points",
    "load_observations",
    "write_observations",
    "load_observation_dir",
]
