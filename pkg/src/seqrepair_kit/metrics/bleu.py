"""Corpus-level BLEU-4 (single reference, clipped n-gram counts, no smoothing)."""

from __future__ import annotations

import math
from collections import Counter
from typing import Hashable, List, Sequence, Tuple

from ..core.exceptions import ContractViolation


def ngrams(tokens: Sequence[Hashable], n: int) -> List[Tuple[Hashable, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def modified_precision_counts(
    candidates: Sequence[Sequence[Hashable]], references: Sequence[Sequence[Hashable]], n: int
) -> Tuple[int, int]:
    """Corpus totals of clipped matches and candidate n-grams of order ``n``."""
    matched = total = 0
    for candidate, reference in zip(candidates, references):
        counts = Counter(ngrams(list(candidate), n))
        ref_counts = Counter(ngrams(list(reference), n))
        matched += sum(min(count, ref_counts[gram]) for gram, count in counts.items())
        total += sum(counts.values())
    return matched, total


def brevity_penalty(candidate_length: int, reference_length: int) -> float:
    if candidate_length == 0:
        return 0.0
    if candidate_length > reference_length:
        return 1.0
    return math.exp(1.0 - reference_length / candidate_length)


def bleu4(
    candidates: Sequence[Sequence[Hashable]],
    references: Sequence[Sequence[Hashable]],
    max_order: int = 4,
) -> float:
    """
    ``BP * exp(mean_n log p_n)`` over orders ``1..max_order``.

    Returns 0 when any corpus-level precision is 0 (including orders longer
    than every candidate).

    Raises:
        ContractViolation: If the corpus is empty or the lists are not aligned

    Examples:
        >>> round(bleu4([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e"]]), 4)
        0.7788
    """
    if not candidates or len(candidates) != len(references):
        raise ContractViolation(
            "bleu4 needs aligned non-empty corpora, got {c} candidates and {r} references",
            params={"c": len(candidates), "r": len(references)},
        )
    log_sum = 0.0
    for n in range(1, max_order + 1):
        matched, total = modified_precision_counts(candidates, references, n)
        if matched == 0 or total == 0:
            return 0.0
        log_sum += math.log(matched / total) / max_order
    c = sum(len(candidate) for candidate in candidates)
    r = sum(len(reference) for reference in references)
    return brevity_penalty(c, r) * math.exp(log_sum)
