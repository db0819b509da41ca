"""Token inventory: framework specials followed by the task symbols."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ..core.exceptions import ConfigurationError, TokenIndexError
from ..core.models import Task, TrainConfig
from ..settings import EOS_ID, PAD_ID, SOS_ID, TASK_OFFSET


@dataclass(frozen=True)
class Vocab:
    """
    Maps task symbols to token ids.

    Ids ``0..2`` are PAD, SOS and EOS; the task symbols occupy ``3..V-1`` in
    the order given.

    Args:
        symbols (Tuple[int, ...]): Task symbols (sorting values or grammar terminal labels)
        task (str): Task name recorded for compatibility checks

    Examples:
        >>> vocab = Vocab.for_sorting(50)
        >>> vocab.size
        54
        >>> vocab.encode([0, 1])
        [3, 4]
    """

    symbols: Tuple[int, ...]
    task: str = "custom"

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise ConfigurationError("vocabulary symbols must be distinct")

    @classmethod
    def for_sorting(cls, max_value: int) -> Vocab:
        return cls(tuple(range(max_value + 1)), Task.SORT.value)

    @classmethod
    def for_grammar(cls, terminals: Iterable[int]) -> Vocab:
        return cls(tuple(sorted(terminals)), Task.CFG.value)

    @classmethod
    def for_task(cls, config: TrainConfig) -> Vocab:
        if config.task is Task.SORT:
            return cls.for_sorting(config.data.sort_max_value)
        from .grammar import default_grammar

        return cls.for_grammar(default_grammar().terminal_labels)

    @property
    def size(self) -> int:
        """V, the total vocabulary size including specials."""
        return TASK_OFFSET + len(self.symbols)

    @property
    def pad(self) -> int:
        return PAD_ID

    @property
    def sos(self) -> int:
        return SOS_ID

    @property
    def eos(self) -> int:
        return EOS_ID

    @property
    def task_ids(self) -> np.ndarray:
        return np.arange(TASK_OFFSET, self.size)

    @property
    def _index(self) -> Dict[int, int]:
        return {symbol: TASK_OFFSET + i for i, symbol in enumerate(self.symbols)}

    def encode(self, symbols: Sequence[int]) -> List[int]:
        """
        Task symbols to ids.

        Raises:
            TokenIndexError: If a symbol is not part of the vocabulary
        """
        index = self._index
        try:
            return [index[int(s)] for s in symbols]
        except KeyError as e:
            raise TokenIndexError("unknown task symbol {s}", params={"s": e.args[0]}) from e

    def decode(self, ids: Iterable[int], stop_at_eos: bool = True) -> List[int]:
        """Ids to task symbols; specials are dropped and decoding stops at EOS."""
        out: List[int] = []
        for token in ids:
            token = int(token)
            if token == EOS_ID and stop_at_eos:
                break
            if token >= TASK_OFFSET and token < self.size:
                out.append(self.symbols[token - TASK_OFFSET])
        return out
