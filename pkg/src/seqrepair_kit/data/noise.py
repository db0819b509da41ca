"""Denoising-autoencoder input corruption."""

from __future__ import annotations

from typing import List, Sequence

from ..core.exceptions import ContractViolation
from .rng import Rng


def noise_sequence(y: Sequence[int], rng: Rng, p_drop: float = 0.2, rate: float = 0.03) -> List[int]:
    """
    Corrupt a clean sequence for pretraining.

    Each token is dropped independently with probability ``p_drop``; then
    ``n = round(rate * len(y))`` random insertions (tokens drawn from ``y``
    itself) and ``n`` random deletions are applied. The result always keeps
    at least one token.

    Raises:
        ContractViolation: If ``y`` is empty
    """
    if not y:
        raise ContractViolation("cannot noise an empty sequence")
    source = list(y)
    keep = rng.random(len(source)) >= p_drop
    out = [token for token, kept in zip(source, keep) if kept]
    if not out:
        out = [source[int(rng.integers(0, len(source)))]]

    n = int(round(rate * len(source)))
    for _ in range(n):
        token = source[int(rng.integers(0, len(source)))]
        out.insert(int(rng.integers(0, len(out) + 1)), token)
    for _ in range(n):
        if len(out) <= 1:
            break
        del out[int(rng.integers(0, len(out)))]
    return out
