"""fracflow autodiff - float64 reverse mode with differentiable gradients."""

from fracflow.autodiff.exceptions import (
    AutodiffError,
    ShapeMismatchError,
    NotScalarError,
    NonFiniteError,
)
from fracflow.autodiff.tape import (
    DTYPE,
    TapeNode,
    GradientReport,
    leaf,
    forward,
    grad,
    gradient,
    trace_graph,
    check_gradient,
)

__all__ = [
    "AutodiffError",
    "ShapeMismatchError",
    "NotScalarError",
    "NonFiniteError",
    "DTYPE",
    "TapeNode",
    "GradientReport",
    "leaf",
    "forward",
    "grad",
    "gradient",
    "trace_graph",
    "check_gradient",
]
