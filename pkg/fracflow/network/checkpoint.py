"""Versioned checkpoints of a NetworkSet and the trainer state around it."""

import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any

import torch

from fracflow.network.config import MLPConfig
from fracflow.network.exceptions import CheckpointError
from fracflow.network.layers import build_network
from fracflow.network.nets import FIELD_ROLES, FieldNetwork, NetworkSet
from fracflow.network.normalizer import Normalizer

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "fracflow-checkpoint/1"


def save_checkpoint(path: Path, nets: NetworkSet, extra: dict[str, Any] | None = None) -> Path:
    """Write parameters, normalizer buffers, configs and any trainer state.

    ``extra`` carries optimizer state, inverse parameters, the epoch and the
    like; it must hold only tensors and plain Python values.
    """
    payload = {
        "format": CHECKPOINT_FORMAT,
        "configs": {role: asdict(cfg) for role, cfg in nets.configs.items()},
        "normalizers": nets.describe(),
        "state": nets.state_dict(),
        "extra": extra or {},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(payload, path)
    logger.debug(f"Saved checkpoint to {path}")
    return path


def load_checkpoint(path: Path) -> tuple[NetworkSet, dict[str, Any]]:
    """Rebuild the NetworkSet stored at ``path`` and return it with its extras.

    Raises:
        CheckpointError: If the file is unreadable or of another format
    """
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except (OSError, RuntimeError, EOFError) as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a {CHECKPOINT_FORMAT} file")

    configs = {role: MLPConfig(**cfg) for role, cfg in payload["configs"].items()}
    meta = payload["normalizers"]
    in_norm = Normalizer.from_dict(meta["in_norm"])

    fields = {}
    for role in FIELD_ROLES:
        net = build_network(configs[role], seed=0)
        window = meta["windows"].get(role)
        out_norm = Normalizer.from_dict(meta["out_norms"][role])
        fields[role] = FieldNetwork(net, in_norm, out_norm, window=tuple(window) if window else None)
    weights = {
        role: build_network(cfg, seed=0) for role, cfg in configs.items() if role not in FIELD_ROLES
    }
    nets = NetworkSet(fields, weights, in_norm, configs)
    nets.load_state_dict(payload["state"])
    return nets, payload["extra"]
