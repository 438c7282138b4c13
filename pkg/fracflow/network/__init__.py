"""fracflow network - adaptive-tanh MLPs, Fourier path, normalizers, checkpoints."""

from fracflow.network.exceptions import NetworkError, NonFiniteActivationError, CheckpointError
from fracflow.network.config import MLPConfig, MATRIX_CONFIG, FRACTURE_CONFIG, WEIGHT_CONFIG
from fracflow.network.layers import (
    AdaptiveTanh,
    MLP,
    FourierMLP,
    init_glorot,
    build_network,
    adaptive_slopes,
)
from fracflow.network.normalizer import EPS_STD, Normalizer
from fracflow.network.nets import (
    FIELD_ROLES,
    WEIGHT_ROLES,
    saturation_head,
    FieldNetwork,
    NetworkSet,
    build_network_set,
)
from fracflow.network.checkpoint import CHECKPOINT_FORMAT, save_checkpoint, load_checkpoint

__all__ = [
    "NetworkError",
    "NonFiniteActivationError",
    "CheckpointError",
    "MLPConfig",
    "MATRIX_CONFIG",
    "FRACTURE_CONFIG",
    "WEIGHT_CONFIG",
    "AdaptiveTanh",
    "MLP",
    "FourierMLP",
    "init_glorot",
    "build_network",
    "adaptive_slopes",
    "EPS_STD",
    "Normalizer",
    "FIELD_ROLES",
    "WEIGHT_ROLES",
    "saturation_head",
    "FieldNetwork",
    "NetworkSet",
    "build_network_set",
    "CHECKPOINT_FORMAT",
    "save_checkpoint",
    "load_checkpoint",
]
