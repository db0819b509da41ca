"""Differentiable primitives built on :mod:`seqrepair_kit.core.tensor`.

Every op here has a dedicated backward rule and is covered by a finite
difference check in the test-suite.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from ..settings import PROB_FLOOR
from .exceptions import ContractViolation, TokenIndexError
from .tensor import (
    Tensor,
    TensorLike,
    as_tensor,
    clamp_min,
    concat,
    log,
    make_result,
    relu,
    sigmoid,
    stack,
    tanh,
    where,
)

__all__ = [
    "softmax",
    "log_floor",
    "pick",
    "cross_entropy",
    "embedding",
    "unfold1d",
    "linear",
    "sigmoid",
    "tanh",
    "relu",
    "concat",
    "stack",
    "where",
]


def softmax(logits: TensorLike, axis: int = -1) -> Tensor:
    """
    Numerically stable softmax.

    The row maximum is subtracted before exponentiation, so logits up to
    +/-1e4 never overflow, and the output is invariant to adding a constant.

    Raises:
        ContractViolation: If the reduced axis is empty
    """
    logits = as_tensor(logits)
    if logits.ndim == 0 or logits.shape[axis] == 0:
        raise ContractViolation("softmax needs at least one logit")
    shifted = logits.data - logits.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=axis, keepdims=True)

    def backward(g: np.ndarray):
        inner = (g * out_data).sum(axis=axis, keepdims=True)
        return (out_data * (g - inner),)

    return make_result(out_data, (logits,), backward, "softmax")


def log_floor(probs: Tensor, floor: float = PROB_FLOOR) -> Tensor:
    """``log(max(p, floor))`` so confident wrong predictions give a finite loss."""
    return log(clamp_min(probs, floor))


def pick(dist: Tensor, index: Union[int, np.ndarray]) -> Tensor:
    """Select ``dist[..., index]`` along the last axis (one index per leading position)."""
    idx = np.asarray(index, dtype=np.int64)
    vocab = dist.shape[-1]
    if idx.shape != dist.shape[:-1]:
        raise ContractViolation(
            "index shape {got} does not match distribution batch shape {expected}",
            params={"got": idx.shape, "expected": dist.shape[:-1]},
        )
    if idx.size and (idx.min() < 0 or idx.max() >= vocab):
        raise TokenIndexError(
            "target index out of range for vocabulary of size {vocab}", params={"vocab": vocab}
        )
    gather = idx[..., None]
    out_data = np.take_along_axis(dist.data, gather, axis=-1)[..., 0]

    def backward(g: np.ndarray):
        full = np.zeros_like(dist.data)
        np.put_along_axis(full, gather, g[..., None], axis=-1)
        return (full,)

    return make_result(out_data, (dist,), backward, "pick")


def cross_entropy(dist: TensorLike, target: Union[int, np.ndarray]) -> Tensor:
    """
    Negative log-probability of ``target`` under ``dist``.

    Args:
        dist: Probability vector(s), last axis is the vocabulary
        target: Token index, or an integer array matching the leading shape

    Returns:
        Tensor: ``-log(dist[target])`` per leading position, floored at 1e-12

    Raises:
        TokenIndexError: If a target falls outside the vocabulary

    Examples:
        >>> cross_entropy([0.5, 0.5], 1).item()  # ln 2
        0.6931...
    """
    dist = as_tensor(dist)
    return -log_floor(pick(dist, target))


def embedding(table: Tensor, ids: np.ndarray) -> Tensor:
    """Row lookup ``table[ids]``; repeated ids accumulate their gradients."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise TokenIndexError(
            "token id out of range for vocabulary of size {vocab}", params={"vocab": table.shape[0]}
        )
    return table[ids]


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return x @ weight + bias


def unfold1d(x: Tensor, kernel_size: int) -> Tensor:
    """
    Zero-padded sliding windows over the time axis.

    Args:
        x: ``(B, T, C)`` input
        kernel_size: Window width ``k``; "same" padding keeps ``T`` outputs

    Returns:
        Tensor: ``(B, T, k * C)`` windows, window ``t`` centred on position ``t``
    """
    if x.ndim != 3:
        raise ContractViolation("unfold1d expects (batch, time, channels), got {shape}", params={"shape": x.shape})
    batch, steps, channels = x.shape
    left = (kernel_size - 1) // 2
    right = kernel_size - 1 - left
    padded = np.pad(x.data, ((0, 0), (left, right), (0, 0)))
    index = np.arange(steps)[:, None] + np.arange(kernel_size)[None, :]
    out_data = padded[:, index, :].reshape(batch, steps, kernel_size * channels)

    def backward(g: np.ndarray):
        g_windows = g.reshape(batch, steps, kernel_size, channels)
        g_padded = np.zeros_like(padded)
        np.add.at(g_padded, (slice(None), index, slice(None)), g_windows)
        return (g_padded[:, left : left + steps, :],)

    return make_result(out_data, (x,), backward, "unfold1d")
