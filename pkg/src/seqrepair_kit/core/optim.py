"""Optimizers (RMSprop, Adam) and Wasserstein weight clipping.

The ``*_step`` functions are pure: they take one parameter array, its
gradient and its slot state and return new arrays. The :class:`RMSprop` and
:class:`Adam` classes apply them to a named parameter set in insertion order,
which keeps every run reproducible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..settings import ADAM_BETAS, OPTIM_EPS, RMSPROP_RHO
from .exceptions import ConfigurationError, ContractViolation
from .tensor import Tensor

logger = logging.getLogger(__name__)


class RMSpropConfig(BaseModel):
    """RMSprop hyperparameters."""

    model_config = ConfigDict(extra="forbid")

    lr: float = Field(..., gt=0)
    rho: float = Field(RMSPROP_RHO, ge=0.0, lt=1.0)
    eps: float = Field(OPTIM_EPS, gt=0)


class AdamConfig(BaseModel):
    """Adam hyperparameters (bias correction always applied)."""

    model_config = ConfigDict(extra="forbid")

    lr: float = Field(..., gt=0)
    beta1: float = Field(ADAM_BETAS[0], ge=0.0, lt=1.0)
    beta2: float = Field(ADAM_BETAS[1], ge=0.0, lt=1.0)
    eps: float = Field(OPTIM_EPS, gt=0)


@dataclass
class SlotState:
    """Per-parameter accumulators; shapes always match the parameter."""

    v: Optional[np.ndarray] = None
    m: Optional[np.ndarray] = None
    step: int = 0


@dataclass
class OptimizerState:
    """Step counter plus one :class:`SlotState` per named parameter."""

    step: int = 0
    slots: Dict[str, SlotState] = field(default_factory=dict)

    def to_arrays(self) -> Dict[str, np.ndarray]:
        arrays: Dict[str, np.ndarray] = {}
        for name, slot in self.slots.items():
            if slot.v is not None:
                arrays[f"v/{name}"] = slot.v
            if slot.m is not None:
                arrays[f"m/{name}"] = slot.m
            arrays[f"n/{name}"] = np.array([slot.step], dtype=np.float32)
        return arrays

    @classmethod
    def from_arrays(cls, step: int, arrays: Mapping[str, np.ndarray]) -> OptimizerState:
        state = cls(step=step)
        for key, value in arrays.items():
            kind, name = key.split("/", 1)
            slot = state.slots.setdefault(name, SlotState(step=step))
            if kind == "n":
                slot.step = int(np.asarray(value).reshape(-1)[0])
            else:
                setattr(slot, kind, np.array(value))
        return state


def _check_shapes(param: np.ndarray, grad: np.ndarray) -> None:
    if param.shape != grad.shape:
        raise ContractViolation(
            "gradient shape {grad} does not match parameter shape {param}",
            params={"grad": grad.shape, "param": param.shape},
        )


def rmsprop_step(
    param: np.ndarray, grad: np.ndarray, state: SlotState, hyper: RMSpropConfig
) -> Tuple[np.ndarray, SlotState]:
    """
    One RMSprop update: ``v <- rho v + (1 - rho) g^2``, ``theta <- theta - lr g / (sqrt(v) + eps)``.

    Raises:
        ContractViolation: If ``grad`` and ``param`` shapes differ
    """
    _check_shapes(param, grad)
    dtype = param.dtype.type
    v = state.v if state.v is not None else np.zeros_like(param)
    v = dtype(hyper.rho) * v + dtype(1.0 - hyper.rho) * grad * grad
    new_param = param - dtype(hyper.lr) * grad / (np.sqrt(v) + dtype(hyper.eps))
    return new_param, SlotState(v=v, step=state.step + 1)


def adam_step(
    param: np.ndarray, grad: np.ndarray, state: SlotState, hyper: AdamConfig
) -> Tuple[np.ndarray, SlotState]:
    """
    One bias-corrected Adam update.

    Raises:
        ContractViolation: If ``grad`` and ``param`` shapes differ
    """
    _check_shapes(param, grad)
    dtype = param.dtype.type
    step = state.step + 1
    m = state.m if state.m is not None else np.zeros_like(param)
    v = state.v if state.v is not None else np.zeros_like(param)
    m = dtype(hyper.beta1) * m + dtype(1.0 - hyper.beta1) * grad
    v = dtype(hyper.beta2) * v + dtype(1.0 - hyper.beta2) * grad * grad
    m_hat = m / dtype(1.0 - hyper.beta1**step)
    v_hat = v / dtype(1.0 - hyper.beta2**step)
    new_param = param - dtype(hyper.lr) * m_hat / (np.sqrt(v_hat) + dtype(hyper.eps))
    return new_param, SlotState(v=v, m=m, step=step)


def clip_weights(params: Union[Mapping[str, Tensor], Iterable[Tensor]], c: float) -> None:
    """
    Clip every entry of every parameter into ``[-c, c]`` in place.

    Entries already inside the range are untouched, so clipping is idempotent.

    Raises:
        ConfigurationError: If ``c`` is not positive
    """
    if not c > 0:
        raise ConfigurationError("clip threshold must be positive, got {c}", field_name="clip", params={"c": c})
    tensors = params.values() if isinstance(params, Mapping) else params
    for tensor in tensors:
        bound = tensor.dtype.type(c)
        tensor.data = np.clip(tensor.data, -bound, bound)


class Optimizer:
    """
    Base class applying a pure step function to a named parameter set.

    Args:
        params (Mapping[str, Tensor]): Parameters to update, in a fixed order
        config: Hyperparameters
    """

    def __init__(self, params: Mapping[str, Tensor], config: Union[RMSpropConfig, AdamConfig]) -> None:
        self.params = dict(params)
        self.config = config
        self.state = OptimizerState()

    @property
    def lr(self) -> float:
        return self.config.lr

    @lr.setter
    def lr(self, value: float) -> None:
        self.config = self.config.model_copy(update={"lr": value})

    def zero_grad(self) -> None:
        for tensor in self.params.values():
            tensor.grad = None

    def _update(self, param: np.ndarray, grad: np.ndarray, slot: SlotState) -> Tuple[np.ndarray, SlotState]:
        raise NotImplementedError

    def step(self) -> None:
        """Apply one update to every parameter holding a gradient."""
        self.state.step += 1
        for name, tensor in self.params.items():
            if tensor.grad is None:
                continue
            slot = self.state.slots.get(name, SlotState())
            tensor.data, self.state.slots[name] = self._update(tensor.data, tensor.grad, slot)

    def state_arrays(self) -> Dict[str, np.ndarray]:
        return self.state.to_arrays()

    def load_state(self, step: int, arrays: Mapping[str, np.ndarray], lr: Optional[float] = None) -> None:
        self.state = OptimizerState.from_arrays(step, arrays)
        if lr is not None:
            self.lr = lr


class RMSprop(Optimizer):
    """RMSprop over a named parameter set (critic and adversarial generator updates)."""

    def _update(self, param, grad, slot):
        return rmsprop_step(param, grad, slot, self.config)


class Adam(Optimizer):
    """Adam over a named parameter set (pretraining and the paired baseline)."""

    def _update(self, param, grad, slot):
        return adam_step(param, grad, slot, self.config)
