"""Sorting benchmark: ascending distinct integers and adjacent-swap corruption."""

from __future__ import annotations

import logging
from typing import List, Sequence

from ..core.exceptions import ConfigurationError
from .rng import Rng

logger = logging.getLogger(__name__)


def gen_sorted_sequence(rng: Rng, length: int = 20, max_value: int = 50) -> List[int]:
    """
    Uniformly chosen ``length``-subset of ``0..max_value`` in ascending order.

    Raises:
        ConfigurationError: If the domain holds fewer than ``length`` values
    """
    if length > max_value + 1:
        raise ConfigurationError(
            "cannot draw {n} distinct values from 0..{m}", field_name="sort_length", params={"n": length, "m": max_value}
        )
    values = rng.choice(max_value + 1, size=length, replace=False)
    return sorted(int(v) for v in values)


def draw_error_count(rng: Rng, mean: float, sd: float, upper: int) -> int:
    """Rounded Gaussian, zero-thresholded and capped at ``upper``."""
    return min(max(int(round(rng.normal(mean, sd))), 0), upper)


def inject_sort_errors(seq: Sequence[int], rng: Rng, mean: float = 8.0, sd: float = 4.0) -> List[int]:
    """
    Swap ``n`` uniformly chosen adjacent pairs, ``n ~ round(N(mean, sd))`` clamped to ``[0, len - 1]``.

    The multiset of tokens is preserved, so sorting the result restores a
    sorted input exactly.
    """
    out = list(seq)
    if len(out) < 2:
        return out
    count = draw_error_count(rng, mean, sd, len(out) - 1)
    for _ in range(count):
        pos = int(rng.integers(0, len(out) - 1))
        out[pos], out[pos + 1] = out[pos + 1], out[pos]
    return out


def sort_oracle(seq: Sequence[int]) -> List[int]:
    """Exact repair target of a corrupted sorting example."""
    return sorted(seq)
