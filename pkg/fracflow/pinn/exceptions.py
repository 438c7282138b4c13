"""Training and loss-assembly exceptions."""

from typing import Any

from fracflow.exceptions import FracFlowError


class TrainingError(FracFlowError):
    """Base exception for physics-informed training errors."""


class DivergenceError(TrainingError):
    """Total loss became non-finite or blew up relative to its early value.

    ``checkpoint`` holds the last good state: network and inverse
    parameter state dicts plus the epoch they were taken at.
    """

    def __init__(self, message: str, checkpoint: dict[str, Any] | None = None):
        super().__init__(message)
        self.checkpoint = checkpoint


class NonFiniteResidualError(TrainingError):
    """A PDE residual is NaN or infinite at some collocation point."""

    def __init__(self, message: str, point: tuple[float, ...] | None = None):
        super().__init__(message)
        self.point = point
