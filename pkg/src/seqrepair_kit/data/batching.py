"""PAD-masked batches of encoded sequences.

A batch row is ``encode(body) + [EOS]`` right-padded with PAD. The same ids
serve as encoder input, teacher-forcing target and, one-hot encoded, as the
real critic rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from ..core.exceptions import ContractViolation
from ..settings import EOS_ID, PAD_ID
from .rng import Rng
from .vocab import Vocab


@dataclass
class SequenceBatch:
    """
    Attributes:
        ids: ``(B, T)`` token ids, PAD beyond each length
        mask: ``(B, T)`` True at real positions (EOS included)
        lengths: ``(B,)`` real positions per row
    """

    ids: np.ndarray
    mask: np.ndarray
    lengths: np.ndarray

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    @property
    def width(self) -> int:
        return int(self.ids.shape[1])

    def one_hot(self, vocab_size: int, dtype=np.float32) -> np.ndarray:
        """``(B, T, V)`` one-hot rows of the ids."""
        return np.eye(vocab_size, dtype=dtype)[self.ids]


def clip_to_length(seq: Sequence[int], max_len: Optional[int]) -> List[int]:
    """Prefix of at most ``max_len`` symbols (curriculum clipping)."""
    seq = list(seq)
    return seq if max_len is None else seq[:max_len]


def make_batch(sequences: Sequence[Sequence[int]], vocab: Vocab, max_len: Optional[int] = None) -> SequenceBatch:
    """
    Encode task-symbol sequences into a padded batch.

    Args:
        sequences: Task symbols per row (no specials)
        vocab: Vocabulary used for encoding
        max_len: Curriculum length; bodies are clipped to it before EOS is appended

    Raises:
        ContractViolation: If ``sequences`` is empty
    """
    if not sequences:
        raise ContractViolation("cannot build an empty batch")
    rows = [vocab.encode(clip_to_length(seq, max_len)) + [EOS_ID] for seq in sequences]
    lengths = np.array([len(row) for row in rows], dtype=np.int64)
    ids = np.full((len(rows), int(lengths.max())), PAD_ID, dtype=np.int64)
    for i, row in enumerate(rows):
        ids[i, : len(row)] = row
    mask = np.arange(ids.shape[1])[None, :] < lengths[:, None]
    return SequenceBatch(ids=ids, mask=mask, lengths=lengths)


def batch_indices(n: int, batch_size: int, rng: Optional[Rng] = None) -> Iterator[np.ndarray]:
    """Index chunks over ``n`` items, shuffled when ``rng`` is given; the last chunk may be short."""
    order = rng.permutation(n) if rng is not None else np.arange(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def num_batches(n: int, batch_size: int) -> int:
    return -(-n // batch_size)
