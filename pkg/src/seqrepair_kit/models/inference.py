"""Batched gradient-free helpers shared by evaluation, diagnostics and training probes."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.tensor import Tensor, no_grad
from ..data.batching import batch_indices, make_batch
from ..data.vocab import Vocab
from .critic import ConvCritic, critic_input
from .generator import Seq2SeqGenerator, SoftBatch


def generate_soft(
    generator: Seq2SeqGenerator,
    vocab: Vocab,
    sources: Sequence[Sequence[int]],
    max_len: Union[int, np.ndarray],
    clip: Optional[int] = None,
) -> SoftBatch:
    """Free-running generation for task-symbol sources (graph kept when grad is enabled)."""
    batch = make_batch(sources, vocab, clip)
    return generator.generate(batch.ids, batch.mask, max_len)


def real_critic_rows(vocab: Vocab, targets: Sequence[Sequence[int]], width: int) -> Tensor:
    """One-hot critic input for task-symbol sequences clipped to ``width - 2`` symbols."""
    batch = make_batch(targets, vocab, width - 2)
    return critic_input(batch.one_hot(vocab.size), batch.lengths, width, vocab.size)


def fake_critic_rows(soft: SoftBatch, width: int, vocab_size: int) -> Tensor:
    return critic_input(soft.rows, soft.lengths, width, vocab_size)


def repair(
    generator: Seq2SeqGenerator,
    vocab: Vocab,
    sources: Sequence[Sequence[int]],
    max_len: Union[int, np.ndarray],
    batch_size: int = 256,
) -> List[List[int]]:
    """
    Hard repairs (argmax per emitted row, decoded to task symbols, cut at EOS).

    ``max_len`` is one row limit or one limit per source.
    """
    limits = np.broadcast_to(np.asarray(max_len, dtype=np.int64), (len(sources),))
    out: List[List[int]] = []
    with no_grad():
        for index in batch_indices(len(sources), batch_size):
            soft = generate_soft(generator, vocab, [sources[i] for i in index], limits[index])
            out.extend(vocab.decode(ids) for ids in soft.hard_sequences())
    return out


def score_pairs(
    critic: ConvCritic,
    generator: Seq2SeqGenerator,
    vocab: Vocab,
    sources: Sequence[Sequence[int]],
    targets: Sequence[Sequence[int]],
    width: int,
    batch_size: int = 256,
) -> Tuple[np.ndarray, np.ndarray, List[List[int]]]:
    """
    Critic scores of real targets and generated repairs, plus the hard repairs.

    Sources and targets are clipped to the critic body (``width - 2``
    symbols); generation runs for at most ``width - 1`` rows.
    """
    body = width - 2
    real_scores, fake_scores, preds = [], [], []
    with no_grad():
        for index in batch_indices(len(sources), batch_size):
            src = [sources[i] for i in index]
            tgt = [targets[i] for i in index]
            soft = generate_soft(generator, vocab, src, body + 1, clip=body)
            real_scores.append(critic.score(real_critic_rows(vocab, tgt, width)).data)
            fake_scores.append(critic.score(fake_critic_rows(soft, width, vocab.size)).data)
            preds.extend(vocab.decode(ids) for ids in soft.hard_sequences())
    return np.concatenate(real_scores), np.concatenate(fake_scores), preds
