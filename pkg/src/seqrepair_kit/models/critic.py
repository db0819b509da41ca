"""Convolutional Wasserstein critic.

Input sequences are ``(B, W, V)`` matrices of one-hot (real data) or soft
(generated) rows, padded with the PAD one-hot row to the critic width ``W``.
The first layer is a bank of "same"-padded 1-D convolutions, one per kernel
size, whose outputs are concatenated along channels. The depth-3 variant
adds two ReLU convolutions on top. A max over time feeds a ReLU fully
connected layer and a single-unit head with an unbounded score.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..core import functional as F
from ..core.exceptions import ContractViolation
from ..core.models import CriticConfig
from ..core.tensor import Tensor, TensorLike, as_tensor, concat, where
from ..data.rng import Rng
from ..settings import PAD_ID, SOS_ID
from .base_model import ParameterStore, xavier_uniform

logger = logging.getLogger(__name__)


def conv1d(seq: TensorLike, weight: Tensor, bias: Optional[Tensor], kernel_size: int) -> Tensor:
    """
    Stride-1 cross-correlation over time with zero "same" padding.

    Args:
        seq: ``(T, C)`` or ``(B, T, C)`` input
        weight: ``(k * C, F)`` filters, rows ordered kernel position major
        bias: ``(F,)`` or None
        kernel_size: ``k``

    Returns:
        Tensor: ``(T, F)`` or ``(B, T, F)`` feature map

    Examples:
        >>> conv1d([[1.0], [2.0], [3.0]], Tensor(np.ones((3, 1))), None, 3).data.ravel()
        array([3., 6., 5.])
    """
    seq = as_tensor(seq, like=weight)
    single = seq.ndim == 2
    if single:
        seq = seq.reshape(1, *seq.shape)
    if weight.shape[0] != kernel_size * seq.shape[-1]:
        raise ContractViolation(
            "filter rows {rows} do not match kernel {k} x channels {c}",
            params={"rows": weight.shape[0], "k": kernel_size, "c": seq.shape[-1]},
        )
    out = F.unfold1d(seq, kernel_size) @ weight
    if bias is not None:
        out = out + bias
    return out.reshape(*out.shape[1:]) if single else out


def one_hot(ids: np.ndarray, vocab_size: int, dtype=np.float32) -> np.ndarray:
    return np.eye(vocab_size, dtype=dtype)[np.asarray(ids, dtype=np.int64)]


def critic_input(rows: TensorLike, lengths: np.ndarray, width: int, vocab_size: int) -> Tensor:
    """
    Frame rows for the critic: an SOS one-hot row, the rows, then PAD one-hots up to ``width``.

    Rows at or beyond each sequence's length are replaced by PAD rows, and
    anything past ``width - 1`` rows is cut.

    Args:
        rows: ``(B, T, V)`` soft or one-hot rows
        lengths: ``(B,)`` number of real rows
        width: Critic input width ``W`` (curriculum length plus two delimiters)
    """
    rows = as_tensor(rows)
    batch, steps, vocab = rows.shape
    if vocab != vocab_size:
        raise ContractViolation("rows have width {v}, vocabulary is {n}", params={"v": vocab, "n": vocab_size})
    body = width - 1
    if steps > body:
        rows = rows[:, :body, :]
    elif steps < body:
        filler = Tensor(np.zeros((batch, body - steps, vocab), rows.dtype))
        rows = concat([rows, filler], axis=1)
    real = np.arange(body)[None, :, None] < np.asarray(lengths)[:, None, None]
    pad_rows = one_hot(np.full((batch, body), PAD_ID), vocab, rows.dtype)
    framed = where(real, rows, pad_rows)
    start = Tensor(one_hot(np.full((batch, 1), SOS_ID), vocab, rows.dtype))
    return concat([start, framed], axis=1)


class ConvCritic(ParameterStore):
    """
    Wasserstein critic over sequence matrices.

    Args:
        vocab_size (int): Input channels V
        config (CriticConfig): Kernel sizes, filters, depth, FC width
        rng (Optional[Rng]): Initialisation stream; None leaves every parameter at zero
        width (Optional[int]): Expected input width; checked by :meth:`score` when set
    """

    def __init__(
        self,
        vocab_size: int,
        config: CriticConfig,
        rng: Optional[Rng] = None,
        width: Optional[int] = None,
    ) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.config = config
        self.depth = config.depth
        self.width = width

        def init(shape, fan_in, fan_out):
            return np.zeros(shape, np.float32) if rng is None else xavier_uniform(rng, shape, fan_in, fan_out)

        channels = vocab_size
        for k in config.kernel_sizes:
            self.register(f"conv1.k{k}.W", init((k * channels, config.filters), k * channels, config.filters))
            self.register(f"conv1.k{k}.b", np.zeros(config.filters, np.float32))
        channels = config.filters * len(config.kernel_sizes)
        if self.depth == 3:
            for layer in (2, 3):
                fan_in = config.deep_kernel * channels
                self.register(f"conv{layer}.W", init((fan_in, config.deep_channels), fan_in, config.deep_channels))
                self.register(f"conv{layer}.b", np.zeros(config.deep_channels, np.float32))
                channels = config.deep_channels
        self.register("fc1.W", init((channels, config.fc_units), channels, config.fc_units))
        self.register("fc1.b", np.zeros(config.fc_units, np.float32))
        self.register("fc2.W", init((config.fc_units, 1), config.fc_units, 1))
        self.register("fc2.b", np.zeros(1, np.float32))

    def features(self, x: Tensor) -> Tensor:
        """Convolution stack output ``(B, W, channels)`` before pooling."""
        bank = [conv1d(x, self[f"conv1.k{k}.W"], self[f"conv1.k{k}.b"], k) for k in self.config.kernel_sizes]
        h = concat(bank, axis=-1) if len(bank) > 1 else bank[0]
        if self.depth == 3:
            h = F.relu(h)
            for layer in (2, 3):
                h = F.relu(conv1d(h, self[f"conv{layer}.W"], self[f"conv{layer}.b"], self.config.deep_kernel))
        return h

    def score(self, x: TensorLike) -> Tensor:
        """
        Critic scores for a ``(B, W, V)`` batch (or one ``(W, V)`` matrix).

        Returns:
            Tensor: ``(B,)`` unbounded scores (a scalar for a single matrix)

        Raises:
            ContractViolation: If the width differs from the configured width
        """
        x = as_tensor(x, like=self["fc2.b"])
        single = x.ndim == 2
        if single:
            x = x.reshape(1, *x.shape)
        if self.width is not None and x.shape[1] != self.width:
            raise ContractViolation(
                "critic expects width {w}, got {got}", params={"w": self.width, "got": x.shape[1]}
            )
        if x.shape[-1] != self.vocab_size:
            raise ContractViolation(
                "critic expects {v} channels, got {got}", params={"v": self.vocab_size, "got": x.shape[-1]}
            )
        pooled = self.features(x).max(axis=1)
        hidden = F.relu(pooled @ self["fc1.W"] + self["fc1.b"])
        scores = (hidden @ self["fc2.W"] + self["fc2.b"]).reshape(x.shape[0])
        return scores.reshape(()) if single else scores

    def first_layer_filters(self, kernel_size: int) -> np.ndarray:
        """First-layer filters of one kernel size as ``(F, k, V)``."""
        weight = self[f"conv1.k{kernel_size}.W"].data
        return np.transpose(weight.reshape(kernel_size, self.vocab_size, -1), (2, 0, 1))
