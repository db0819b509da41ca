"""Finite-difference oracle for reverse-mode gradients."""

from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np

from ..settings import GRADCHECK_STEP
from .exceptions import ContractViolation, GradientCheckError
from .tensor import Tensor, default_dtype, no_grad

logger = logging.getLogger(__name__)

# Denominator floor: gradients near zero are compared on an absolute scale
_REL_FLOOR = 1e-3


def _op_name(op: Callable) -> str:
    return getattr(op, "__name__", type(op).__name__)


def _evaluate(op: Callable[..., Tensor], tensors: Sequence[Tensor], name: str) -> float:
    out = op(*tensors)
    if out.size != 1:
        raise ContractViolation(
            "gradient check needs a scalar output, {name} returned shape {shape}",
            field_name=name,
            params={"name": name, "shape": out.shape},
        )
    value = float(out.data.reshape(-1)[0])
    if not np.isfinite(value):
        raise GradientCheckError("non-finite output while checking {name}", field_name=name, params={"name": name})
    return value


def grad_check(op: Callable[..., Tensor], point: Sequence[np.ndarray], step: float = GRADCHECK_STEP) -> float:
    """
    Compare reverse-mode gradients with central finite differences in float64.

    Args:
        op: Function of ``len(point)`` tensors returning a single-element tensor
        point: Input arrays at which both gradients are evaluated
        step: Finite-difference step

    Returns:
        float: Maximum relative error over every input entry

    Raises:
        GradientCheckError: If the output or a gradient is not finite
    """
    name = _op_name(op)
    with default_dtype(np.float64):
        tensors = [Tensor(np.array(p, dtype=np.float64), requires_grad=True) for p in point]
        out = op(*tensors)
        if out.size != 1:
            raise ContractViolation(
                "gradient check needs a scalar output, {name} returned shape {shape}",
                field_name=name,
                params={"name": name, "shape": out.shape},
            )
        out.backward()

        worst = 0.0
        for tensor in tensors:
            analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
            if not np.all(np.isfinite(analytic)):
                raise GradientCheckError("non-finite gradient while checking {name}", field_name=name, params={"name": name})
            with no_grad():
                flat = tensor.data.reshape(-1)
                for i in range(flat.size):
                    original = flat[i]
                    flat[i] = original + step
                    plus = _evaluate(op, tensors, name)
                    flat[i] = original - step
                    minus = _evaluate(op, tensors, name)
                    flat[i] = original
                    numeric = (plus - minus) / (2 * step)
                    exact = analytic.reshape(-1)[i]
                    scale = max(abs(exact), abs(numeric), _REL_FLOOR)
                    worst = max(worst, abs(exact - numeric) / scale)
    logger.debug(f"grad_check {name}: max relative error {worst:.3e}")
    return worst
