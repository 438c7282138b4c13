"""Differentiation engine exceptions."""

from fracflow.exceptions import FracFlowError


class AutodiffError(FracFlowError):
    """Base exception for differentiation errors."""


class ShapeMismatchError(AutodiffError):
    """Operands of a recorded operation have incompatible shapes."""


class NotScalarError(AutodiffError):
    """Reverse pass requested from a non-scalar output."""


class NonFiniteError(AutodiffError):
    """A value or gradient under comparison is NaN or infinite."""
