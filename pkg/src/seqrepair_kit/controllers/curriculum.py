"""Sequence-length curriculum."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional

from ..core.models import CurriculumConfig


@dataclass
class CurriculumState:
    """
    Attributes:
        length: Current maximum task length (sequences are clipped to it)
        max_length: Task maximum; the curriculum is complete once reached
        epochs_at_level: Epochs trained at the current length
        accuracy: Last critic accuracy estimate at this level
        history: Every length visited, in order
    """

    length: int
    max_length: int
    epochs_at_level: int = 0
    accuracy: Optional[float] = None
    history: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.history:
            self.history = [self.length]

    @classmethod
    def initial(cls, config: CurriculumConfig, max_length: int) -> CurriculumState:
        length = min(config.start, max_length) if config.enabled else max_length
        return cls(length=length, max_length=max_length)

    @property
    def complete(self) -> bool:
        return self.length >= self.max_length

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> CurriculumState:
        return cls(**data)


def curriculum_advance(
    state: CurriculumState,
    critic_accuracy: Optional[float],
    epochs_at_level: Optional[int] = None,
    step: int = 2,
    threshold: float = 0.55,
    max_epochs: int = 40,
) -> CurriculumState:
    """
    Lengthen sequences by ``step`` once the critic accuracy falls below
    ``threshold`` or ``max_epochs`` epochs were spent at the current length.

    The length never exceeds ``state.max_length``; the level counter resets
    on every advance. A None accuracy leaves only the epoch trigger.

    Examples:
        >>> curriculum_advance(CurriculumState(5, 20), 0.54, 3).length
        7
        >>> curriculum_advance(CurriculumState(5, 20), 0.70, 10).length
        5
    """
    epochs = state.epochs_at_level if epochs_at_level is None else epochs_at_level
    updated = replace(state, epochs_at_level=epochs, accuracy=critic_accuracy, history=list(state.history))
    if state.complete:
        return updated
    low_accuracy = critic_accuracy is not None and critic_accuracy < threshold
    if low_accuracy or epochs >= max_epochs:
        updated.length = min(state.length + step, state.max_length)
        updated.epochs_at_level = 0
        updated.history.append(updated.length)
    return updated
