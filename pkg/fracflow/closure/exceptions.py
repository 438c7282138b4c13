"""Constitutive-function exceptions."""

from fracflow.exceptions import FracFlowError


class ClosureError(FracFlowError):
    """Base exception for saturation-function errors."""


class InvalidParameterError(ClosureError):
    """A Corey, Leverett or fluid parameter is outside its valid range."""


class SingularEvaluationError(ClosureError):
    """J-function evaluated at a saturation endpoint where it diverges."""
