"""Repair accuracy metrics over hard (decoded) task-symbol sequences."""

from typing import Sequence

from ..core.exceptions import ContractViolation
from ..data.grammar import Grammar, cfg_accepts


def _require(preds: Sequence, name: str) -> None:
    if len(preds) == 0:
        raise ContractViolation("{name} needs at least one prediction", params={"name": name})


def sequence_accuracy(preds: Sequence[Sequence[int]], targets: Sequence[Sequence[int]]) -> float:
    """
    Fraction of exact matches; a length mismatch counts as wrong.

    Raises:
        ContractViolation: If the lists are empty or differ in length
    """
    _require(preds, "sequence_accuracy")
    if len(preds) != len(targets):
        raise ContractViolation(
            "{p} predictions for {t} targets", params={"p": len(preds), "t": len(targets)}
        )
    hits = sum(list(p) == list(t) for p, t in zip(preds, targets))
    return hits / len(preds)


def is_strictly_increasing(seq: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(seq, seq[1:]))


def order_accuracy(preds: Sequence[Sequence[int]]) -> float:
    """Fraction of strictly increasing predictions; the empty sequence counts as ordered."""
    _require(preds, "order_accuracy")
    return sum(is_strictly_increasing(list(p)) for p in preds) / len(preds)


def cfg_validity_rate(preds: Sequence[Sequence[int]], grammar: Grammar) -> float:
    """Fraction of predictions accepted by the grammar recognizer."""
    _require(preds, "cfg_validity_rate")
    return sum(cfg_accepts(p, grammar) for p in preds) / len(preds)
