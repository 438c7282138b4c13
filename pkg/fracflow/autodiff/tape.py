"""Reverse-mode differentiation on torch's dynamic graph.

Every value is float64. Gradients are taken with ``create_graph=True`` by
default, so a gradient is itself a recorded node and can be differentiated
again; this is how the PDE residuals get their second derivatives.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np
import torch

from fracflow.autodiff.exceptions import NonFiniteError, NotScalarError, ShapeMismatchError

logger = logging.getLogger(__name__)

DTYPE = torch.float64


@dataclass(frozen=True)
class TapeNode:
    """One recorded operation: its name and the indices of its inputs."""

    index: int
    op: str
    parents: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GradientReport:
    """Analytic against central-difference gradient of a scalar function."""

    analytic: np.ndarray
    numeric: np.ndarray
    max_rel_error: float


def leaf(value: Any, requires_grad: bool = True) -> torch.Tensor:
    """Bind a value as a float64 leaf of the graph."""
    t = torch.as_tensor(value, dtype=DTYPE).clone()
    return t.requires_grad_(requires_grad)


def forward(fn: Callable[..., Any], inputs: Mapping[str, Any]) -> tuple[Any, dict[str, torch.Tensor]]:
    """Evaluate ``fn`` on freshly bound leaves.

    Returns:
        (outputs, leaves) so callers can differentiate outputs with respect
        to the leaves.

    Raises:
        ShapeMismatchError: If an operation receives incompatible shapes
    """
    leaves = {name: leaf(value) for name, value in inputs.items()}
    try:
        out = fn(**leaves)
    except RuntimeError as e:
        name = getattr(fn, "__name__", type(fn).__name__)
        raise ShapeMismatchError(f"{name}: {e}") from e
    return out, leaves


def grad(
    output: torch.Tensor,
    wrt: Sequence[torch.Tensor],
    create_graph: bool = True,
) -> list[torch.Tensor]:
    """Gradient of a scalar output with respect to each tensor in ``wrt``.

    Leaves the output does not depend on get a zero gradient.

    Raises:
        NotScalarError: If output has more than one element
    """
    if output.numel() != 1:
        raise NotScalarError(f"grad needs a scalar output, got shape {tuple(output.shape)}")
    grads = torch.autograd.grad(
        output, list(wrt), create_graph=create_graph, retain_graph=True, allow_unused=True,
    )
    return [torch.zeros_like(w) if g is None else g for g, w in zip(grads, wrt)]


def gradient(u: torch.Tensor, x: torch.Tensor, create_graph: bool = True) -> torch.Tensor:
    """Pointwise derivatives of a batched field ``u`` with respect to ``x``.

    Samples are independent, so differentiating the batch sum returns each
    sample's own gradient row.
    """
    if not u.requires_grad:
        return torch.zeros_like(x)
    (g,) = torch.autograd.grad(
        u.sum(), x, create_graph=create_graph, retain_graph=True, allow_unused=True,
    )
    return torch.zeros_like(x) if g is None else g


def trace_graph(output: torch.Tensor) -> list[TapeNode]:
    """Recorded operations behind ``output`` in reverse topological order.

    The first node produces ``output``; every node appears once and only
    after all nodes that consume it.
    """
    if output.grad_fn is None:
        return []

    order: list[Any] = []
    seen: set[int] = set()
    stack: list[tuple[Any, bool]] = [(output.grad_fn, False)]
    while stack:
        fn, expanded = stack.pop()
        if expanded:
            order.append(fn)
            continue
        if id(fn) in seen:
            continue
        seen.add(id(fn))
        stack.append((fn, True))
        for parent, _ in fn.next_functions:
            if parent is not None and id(parent) not in seen:
                stack.append((parent, False))

    order.reverse()
    index = {id(fn): i for i, fn in enumerate(order)}
    return [
        TapeNode(
            index=i,
            op=fn.name(),
            parents=tuple(index[id(p)] for p, _ in fn.next_functions if p is not None),
        )
        for i, fn in enumerate(order)
    ]


def check_gradient(
    f: Callable[[torch.Tensor], torch.Tensor],
    x: Any,
    h: float = 1e-5,
) -> GradientReport:
    """Compare reverse-mode and central-difference gradients of a scalar f.

    The error is measured against the largest gradient magnitude.

    Raises:
        NonFiniteError: If x, f(x) or either gradient is not finite
    """
    x0 = torch.as_tensor(x, dtype=DTYPE).detach().clone()
    if not torch.isfinite(x0).all():
        raise NonFiniteError("check_gradient needs a finite x")

    xl = x0.clone().requires_grad_(True)
    value = f(xl)
    if not torch.isfinite(value).all():
        raise NonFiniteError(f"f(x) is not finite: {value}")
    (analytic,) = grad(value, [xl], create_graph=False)

    numeric = torch.zeros_like(x0)
    flat = numeric.view(-1)
    with torch.no_grad():
        for i in range(x0.numel()):
            xp = x0.clone()
            xm = x0.clone()
            xp.view(-1)[i] += h
            xm.view(-1)[i] -= h
            flat[i] = (f(xp) - f(xm)) / (2.0 * h)

    a = analytic.detach().cpu().numpy()
    n = numeric.cpu().numpy()
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(n))):
        raise NonFiniteError("non-finite gradient in check_gradient")
    scale = max(float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(n), initial=0.0)), 1e-300)
    err = float(np.max(np.abs(a - n), initial=0.0)) / scale
    logger.debug(f"check_gradient: max relative error {err:.3e} over {a.size} components")
    return GradientReport(analytic=a, numeric=n, max_rel_error=err)
