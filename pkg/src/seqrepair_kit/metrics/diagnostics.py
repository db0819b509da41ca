"""Critic diagnostics: ranking accuracy, paired loss ratio and filter sparsity."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.exceptions import ContractViolation
from ..data.batching import clip_to_length
from ..data.vocab import Vocab
from ..models.critic import ConvCritic
from ..models.generator import Seq2SeqGenerator
from ..models.inference import score_pairs

logger = logging.getLogger(__name__)


def hoyer_sparsity(profile: Sequence[float]) -> float:
    """
    ``(sqrt(n) - |w|_1 / |w|_2) / (sqrt(n) - 1)``; 1 for one-hot, 0 for uniform.

    An all-zero profile scores 0 and a single-entry profile scores 1.

    Examples:
        >>> round(hoyer_sparsity([1, 1, 0, 0]), 4)
        0.5858
    """
    w = np.abs(np.asarray(profile, dtype=np.float64)).ravel()
    n = w.size
    if n == 0:
        raise ContractViolation("hoyer_sparsity needs a non-empty profile")
    l2 = float(np.sqrt((w * w).sum()))
    if l2 == 0.0:
        return 0.0
    if n == 1:
        return 1.0
    root = math.sqrt(n)
    return float((root - w.sum() / l2) / (root - 1.0))


def critic_accuracy(real_scores: Sequence[float], fake_scores: Sequence[float]) -> float:
    """
    Fraction of index-aligned pairs the critic ranks correctly (real above fake).

    Raises:
        ContractViolation: If the batches are empty or differ in size
    """
    real = np.asarray(real_scores, dtype=np.float64)
    fake = np.asarray(fake_scores, dtype=np.float64)
    if real.size == 0 or real.shape != fake.shape:
        raise ContractViolation(
            "critic_accuracy needs equal non-empty batches, got {a} and {b}",
            params={"a": real.shape, "b": fake.shape},
        )
    return float(np.mean(real > fake))


@dataclass
class LossRatioResult:
    """
    Wasserstein value ``mean D(real) - mean D(fake)`` per partition.

    ``ratio`` is ``value_incorrect / value_correct`` and stays None when a
    partition is empty or the correct value is zero.
    """

    n_correct: int
    n_incorrect: int
    value_correct: Optional[float]
    value_incorrect: Optional[float]
    ratio: Optional[float]

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None

    def as_row(self) -> Dict[str, object]:
        return {
            "n_correct": self.n_correct,
            "n_incorrect": self.n_incorrect,
            "value_correct": self.value_correct,
            "value_incorrect": self.value_incorrect,
            "ratio": self.ratio,
            "ratio_defined": self.ratio_defined,
        }


def _partition_value(real: np.ndarray, fake: np.ndarray, selector: np.ndarray) -> Optional[float]:
    if not selector.any():
        return None
    return float(real[selector].mean() - fake[selector].mean())


def loss_ratio_from_scores(real: np.ndarray, fake: np.ndarray, correct: np.ndarray) -> LossRatioResult:
    correct = np.asarray(correct, bool)
    value_correct = _partition_value(real, fake, correct)
    value_incorrect = _partition_value(real, fake, ~correct)
    ratio = None
    if value_correct is not None and value_incorrect is not None and value_correct != 0.0:
        ratio = value_incorrect / value_correct
    return LossRatioResult(
        n_correct=int(correct.sum()),
        n_incorrect=int((~correct).sum()),
        value_correct=value_correct,
        value_incorrect=value_incorrect,
        ratio=ratio,
    )


def loss_ratio_diagnostic(
    critic: ConvCritic,
    generator: Seq2SeqGenerator,
    vocab: Vocab,
    sources: Sequence[Sequence[int]],
    targets: Sequence[Sequence[int]],
    width: int,
    batch_size: int = 256,
) -> LossRatioResult:
    """
    Split paired data by whether the hard repair equals the target and
    compare the critic's Wasserstein value on both halves.

    Sequences are clipped to the critic body (``width - 2`` symbols) before
    comparison.
    """
    real, fake, preds = score_pairs(critic, generator, vocab, sources, targets, width, batch_size)
    body = width - 2
    correct = np.array([list(p) == clip_to_length(t, body) for p, t in zip(preds, targets)], bool)
    result = loss_ratio_from_scores(real, fake, correct)
    logger.debug(f"Loss ratio: {result.as_row()}")
    return result


def export_filter_weights(critic: ConvCritic, kernel_size: int = 11) -> pd.DataFrame:
    """
    First-layer filters of one kernel size, normalized by each filter's max
    absolute weight, with the Hoyer sparsity of its temporal profile.

    The temporal profile of a filter is the L2 norm across channels at each
    kernel position. Falls back to the widest kernel when ``kernel_size`` is
    not part of the critic.

    Returns:
        pd.DataFrame: columns ``filter, position, channel, normalized_weight, sparsity``
    """
    sizes = critic.config.kernel_sizes
    if kernel_size not in sizes:
        kernel_size = max(sizes)
    filters = critic.first_layer_filters(kernel_size).astype(np.float64)
    count, positions, channels = filters.shape

    scale = np.abs(filters).reshape(count, -1).max(axis=1)
    normalized = filters / np.where(scale > 0, scale, 1.0)[:, None, None]
    profiles = np.sqrt((filters * filters).sum(axis=2))
    sparsity = np.array([hoyer_sparsity(p) for p in profiles])

    f_idx, p_idx, c_idx = np.meshgrid(np.arange(count), np.arange(positions), np.arange(channels), indexing="ij")
    return pd.DataFrame(
        {
            "filter": f_idx.ravel(),
            "position": p_idx.ravel(),
            "channel": c_idx.ravel(),
            "normalized_weight": normalized.ravel(),
            "sparsity": sparsity[f_idx.ravel()],
        }
    )


def mean_filter_sparsity(critic: ConvCritic, kernel_size: int = 11) -> float:
    frame = export_filter_weights(critic, kernel_size)
    return float(frame.groupby("filter")["sparsity"].first().mean())
