"""Output directories, run manifests and error-to-exit-code mapping for CLI verbs."""

import hashlib
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator

from fracflow.autodiff import NonFiniteError
from fracflow.cli.output import print_error
from fracflow.config import ExperimentConfig, load_experiment
from fracflow.exceptions import ConfigurationError, FracFlowError
from fracflow.fdsim import SingularSystemError, TimeStepUnderflowError
from fracflow.logging import get_system_info, setup_logging
from fracflow.network import NonFiniteActivationError
from fracflow.pinn import DivergenceError, NonFiniteResidualError

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
LOG_FILE = "run.log"

# First match wins
EXIT_CODES: tuple[tuple[type | tuple[type, ...], int], ...] = (
    (ConfigurationError, 2),
    (DivergenceError, 3),
    (SingularSystemError, 4),
    (TimeStepUnderflowError, 5),
    ((NonFiniteResidualError, NonFiniteActivationError, NonFiniteError), 6),
    (FracFlowError, 1),
)


def exit_code_for(exc: BaseException) -> int:
    """Distinct exit status per error family; 1 for anything else."""
    for kinds, code in EXIT_CODES:
        if isinstance(exc, kinds):
            return code
    return 1


@dataclass
class RunContext:
    """One CLI invocation: its output directory and loaded experiment."""

    command: str
    output: Path
    config: ExperimentConfig | None = None

    def path(self, name: str) -> Path:
        return self.output / name


def write_manifest(
    path: Path,
    command: str,
    config: ExperimentConfig | None = None,
    seed: int | None = None,
    inputs: dict[str, Any] | None = None,
) -> Path:
    """Record what is needed to re-run the command: config hash, seed and versions."""
    manifest = {
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": str(config.source) if config is not None and config.source else None,
        "config_sha256": config.sha256 if config is not None else None,
        "seed": seed if seed is not None else (config.seed if config is not None else None),
        "inputs": inputs or {},
        "system": get_system_info(),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def start_run(
    command: str,
    output: Path,
    config_path: Path | None = None,
    debug: bool = False,
    inputs: dict[str, Any] | None = None,
) -> RunContext:
    """Create the output directory, start ``run.log``, load the config and write the manifest."""
    output.mkdir(parents=True, exist_ok=True)
    setup_logging(debug=debug, log_file=output / LOG_FILE)
    config = load_experiment(config_path) if config_path is not None else None
    write_manifest(output / MANIFEST_FILE, command, config, inputs=inputs)
    logger.info(f"{command}: writing results to {output}")
    return RunContext(command=command, output=output, config=config)


@contextmanager
def guarded(command: str) -> Iterator[None]:
    """Turn fracflow errors into an error line and a distinct exit status."""
    try:
        yield
    except FracFlowError as e:
        code = exit_code_for(e)
        logger.error(f"{command} failed ({type(e).__name__}, exit {code}): {e}")
        print_error(f"{command}: {e}")
        sys.exit(code)
