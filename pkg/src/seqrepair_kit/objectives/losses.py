"""Training objectives.

Likelihood losses are per-token means over the real (unmasked) positions of
a batch, so the weight ``lam`` of a regularizer means the same thing for
short and long sequences. Critic scores are unbounded; the Wasserstein
losses are plain differences of means.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..core import functional as F
from ..core.exceptions import ConfigurationError, ContractViolation, TrainingDivergedError
from ..core.models import RegMode
from ..core.tensor import Tensor, TensorLike, as_tensor
from ..settings import TASK_OFFSET

logger = logging.getLogger(__name__)

Scalar = Union[Tensor, float]


# =============================================================================
# Adversarial losses
# =============================================================================


def wgan_losses(real_scores: TensorLike, fake_scores: TensorLike) -> Tuple[Tensor, Tensor]:
    """
    Wasserstein critic and generator losses.

    Returns:
        Tuple[Tensor, Tensor]: ``-(mean(real) - mean(fake))`` and ``-mean(fake)``

    Raises:
        ContractViolation: If either batch is empty

    Examples:
        >>> d, g = wgan_losses([1.0, 0.5], [0.25, 0.25])
        >>> d.item(), g.item()
        (-0.5, -0.25)
    """
    real = as_tensor(real_scores)
    fake = as_tensor(fake_scores, like=real)
    if real.size == 0 or fake.size == 0:
        raise ContractViolation("wgan_losses needs non-empty score batches")
    critic_loss = fake.mean() - real.mean()
    generator_loss = -fake.mean()
    return critic_loss, generator_loss


def gan_reference_losses(real_probs: TensorLike, fake_probs: TensorLike) -> Tuple[Tensor, Tensor]:
    """
    Original minimax GAN losses for a discriminator emitting probabilities.

    Kept as a reference next to :func:`wgan_losses`; no training path uses it.

    Returns:
        Tuple[Tensor, Tensor]: discriminator loss ``-mean(log D(real)) - mean(log(1 - D(fake)))``
        and the saturating generator loss ``mean(log(1 - D(fake)))``
    """
    real = as_tensor(real_probs)
    fake = as_tensor(fake_probs, like=real)
    if real.size == 0 or fake.size == 0:
        raise ContractViolation("gan_reference_losses needs non-empty batches")
    log_not_fake = F.log_floor(1.0 - fake)
    d_loss = -F.log_floor(real).mean() - log_not_fake.mean()
    return d_loss, log_not_fake.mean()


# =============================================================================
# Likelihood losses
# =============================================================================


def _masked_nll(rows: Tensor, target: np.ndarray, mask: Optional[np.ndarray], name: str) -> Tensor:
    rows = as_tensor(rows)
    target = np.atleast_2d(np.asarray(target, dtype=np.int64))
    if rows.ndim == 2:
        rows = rows.reshape(1, *rows.shape)
    if rows.shape[:2] != target.shape:
        raise ContractViolation(
            "{name}: {rows} rows for a target of shape {target}",
            params={"name": name, "rows": rows.shape[:2], "target": target.shape},
        )
    mask = np.ones(target.shape, bool) if mask is None else np.atleast_2d(np.asarray(mask, bool))
    real = int(mask.sum())
    if real == 0:
        raise ContractViolation("{name}: no unmasked positions", params={"name": name})
    per_token = F.cross_entropy(rows, target)
    return (per_token * mask.astype(rows.dtype)).sum() / float(real)


def auto_loss(rows: TensorLike, x: np.ndarray, mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Autoencoder reconstruction loss: mean ``-log(row_t[x_t])`` over real positions.

    ``rows`` come from decoding ``x`` with teacher forcing on ``x`` itself.

    Raises:
        ContractViolation: If the row count differs from ``len(x)``
    """
    return _masked_nll(rows, x, mask, "auto_loss")


def denoise_pretrain_loss(rows: TensorLike, y: np.ndarray, mask: Optional[np.ndarray] = None) -> Tensor:
    """Reconstruction of clean ``y`` from rows whose encoder consumed a noised copy."""
    return _masked_nll(rows, y, mask, "denoise_pretrain_loss")


def nll_seq2seq_loss(rows: TensorLike, y: np.ndarray, mask: Optional[np.ndarray] = None) -> Tensor:
    """Paired supervised loss for the teacher-forced ``x -> y`` decoding."""
    return _masked_nll(rows, y, mask, "nll_seq2seq_loss")


# =============================================================================
# Frequency regularizer
# =============================================================================


def freq_loss(
    x: np.ndarray,
    rows: TensorLike,
    lengths: Optional[np.ndarray] = None,
    ended: Optional[np.ndarray] = None,
) -> Tensor:
    """
    Squared distance between the token histograms of input and output.

    ``freq(x, i)`` is the share of task token ``i`` among the task tokens of
    ``x``; ``freq(out, i)`` is the summed probability of ``i`` over the
    emitted rows divided by their number ``T'``. A terminating EOS row is not
    counted in ``T'``. Special tokens are left out of both histograms. The
    batch value is the mean of the per-sequence sums.

    Args:
        x: ``(B, T)`` input ids (specials and PAD are ignored)
        rows: ``(B, T', V)`` generator rows
        lengths: Emitted rows per sequence; defaults to all rows
        ended: Whether the last emitted row of a sequence is its EOS row

    Raises:
        ContractViolation: If a sequence has no task tokens or no rows
    """
    rows = as_tensor(rows)
    x = np.atleast_2d(np.asarray(x, dtype=np.int64))
    if rows.ndim == 2:
        rows = rows.reshape(1, *rows.shape)
    batch, steps, vocab = rows.shape
    if steps == 0 or x.shape[0] != batch:
        raise ContractViolation(
            "freq_loss needs one non-empty output per input, got {b} inputs and rows {shape}",
            params={"b": x.shape[0], "shape": rows.shape},
        )
    lengths = np.full(batch, steps, np.int64) if lengths is None else np.asarray(lengths, np.int64)
    ended = np.zeros(batch, bool) if ended is None else np.asarray(ended, bool)
    counted = lengths - ended.astype(np.int64)

    x_hist = np.zeros((batch, vocab), np.float64)
    task_tokens = (x >= TASK_OFFSET) & (x < vocab)
    for b in range(batch):
        np.add.at(x_hist[b], x[b][task_tokens[b]], 1.0)
    totals = x_hist.sum(axis=1, keepdims=True)
    if np.any(totals == 0):
        raise ContractViolation("freq_loss needs at least one task token in every input")
    x_hist = (x_hist / totals)[:, TASK_OFFSET:].astype(rows.dtype)

    row_mask = (np.arange(steps)[None, :] < counted[:, None]).astype(rows.dtype)[:, :, None]
    denom = np.maximum(counted, 1).astype(rows.dtype)[:, None]
    out_hist = (rows * row_mask).sum(axis=1) / denom
    diff = out_hist[:, TASK_OFFSET:] - x_hist
    return (diff * diff).sum(axis=1).mean()


# =============================================================================
# Combination and reporting
# =============================================================================


def combined_generator_loss(wgan_g: Scalar, reg_value: Scalar, mode: Union[RegMode, str], lam: float) -> Scalar:
    """
    ``wgan_g`` plus ``lam`` times the regularizer selected by ``mode``.

    Raises:
        ConfigurationError: On an unknown mode or a negative ``lam``

    Examples:
        >>> combined_generator_loss(-0.25, 0.5, "freq", 1.0)
        0.25
    """
    try:
        mode = RegMode(mode)
    except ValueError as e:
        raise ConfigurationError("unknown regularization mode {mode}", field_name="mode", params={"mode": mode}) from e
    if lam < 0:
        raise ConfigurationError("lambda must be non-negative, got {lam}", field_name="lambda", params={"lam": lam})
    if mode is RegMode.BASE:
        return wgan_g
    return wgan_g + lam * reg_value


@dataclass
class LossReport:
    """Scalar losses of one batch or epoch; absent components stay None."""

    lam: float = 0.0
    wgan_d: Optional[float] = None
    wgan_g: Optional[float] = None
    auto: Optional[float] = None
    freq: Optional[float] = None
    pretrain: Optional[float] = None
    nll: Optional[float] = None

    def as_dict(self) -> Dict[str, Optional[float]]:
        return asdict(self)

    def check_finite(self, batch_index: int, epoch: int = 0) -> None:
        """
        Raises:
            TrainingDivergedError: If a recorded loss is NaN or infinite
        """
        for name, value in self.as_dict().items():
            if value is not None and not math.isfinite(value):
                logger.error(f"Loss {name} became {value} at epoch {epoch}, batch {batch_index}")
                raise TrainingDivergedError(f"{name} loss is {value}", batch_index=batch_index, epoch=epoch)


