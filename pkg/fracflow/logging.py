"""Logging setup for fracflow runs."""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

# Global log file path for access by error handlers
_log_file: Optional[Path] = None


def get_log_dir() -> Path:
    """Get the default log directory path."""
    log_dir = Path.home() / ".local" / "share" / "fracflow" / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir


def get_log_file() -> Optional[Path]:
    """Get the current log file path."""
    return _log_file


def setup_logging(debug: bool = False, log_file: Path | None = None) -> Path:
    """
    Set up logging to file and console.

    Args:
        debug: If True, enable debug level logging to console
        log_file: Explicit log file, usually ``<output>/run.log``. Defaults
            to a dated file in the user log directory.

    Returns:
        Path to the log file
    """
    global _log_file

    if log_file is None:
        log_file = get_log_dir() / f"fracflow-{datetime.now().strftime('%Y-%m-%d')}.log"
    log_file.parent.mkdir(parents=True, exist_ok=True)
    _log_file = log_file

    # Clear existing handlers
    root = logging.getLogger()
    root.handlers.clear()
    root.setLevel(logging.DEBUG)

    # File handler - detailed with line numbers
    file_handler = logging.FileHandler(_log_file)
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d - %(message)s'
    ))
    root.addHandler(file_handler)

    # Console handler - info only (or debug if requested)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG if debug else logging.INFO)
    console_handler.setFormatter(logging.Formatter(
        '%(asctime)s [%(levelname)s] %(message)s'
    ))
    root.addHandler(console_handler)

    # torch is chatty at DEBUG
    logging.getLogger("torch").setLevel(logging.WARNING)

    sys.excepthook = _handle_exception

    logging.info(f"fracflow logging initialized. Log file: {_log_file}")

    return _log_file


def _handle_exception(exc_type, exc_value, exc_traceback):
    """Global exception handler that logs uncaught exceptions."""
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return

    logging.error(
        "Uncaught exception",
        exc_info=(exc_type, exc_value, exc_traceback)
    )


def get_system_info() -> dict:
    """Get interpreter and library versions for run manifests."""
    import platform

    info = {
        "python_version": platform.python_version(),
        "platform": platform.platform(),
        "machine": platform.machine(),
        "fracflow_version": "unknown",
    }

    try:
        from fracflow import __version__
        info["fracflow_version"] = __version__
    except ImportError:
        pass

    for name in ("numpy", "scipy", "torch"):
        try:
            module = __import__(name)
            info[f"{name}_version"] = module.__version__
        except ImportError:
            info[f"{name}_version"] = "not installed"

    return info
