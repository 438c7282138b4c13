"""Reference simulator exceptions."""

from fracflow.exceptions import FracFlowError


class SimulationError(FracFlowError):
    """Base exception for finite-difference simulation errors."""


class SingularSystemError(SimulationError):
    """Pressure system is singular or solved inaccurately."""


class TimeStepUnderflowError(SimulationError):
    """CFL-limited substep fell below the smallest allowed step."""


class WelgeConstructionError(SimulationError):
    """No tangent from the origin touches the fractional-flow curve."""
