"""Seeded random streams.

Every random decision in the kit draws from an :class:`Rng`. An ``Rng`` is a
numpy ``PCG64`` generator seeded through ``SeedSequence(seed, spawn_key=path)``:

* ``split()`` returns the next numbered child stream (``path + (n,)``);
* ``child(name)`` returns the stream keyed by ``crc32(name)`` so a named
  purpose ("init", "train", "noise", ...) always gets the same substream
  regardless of the order in which other streams were created.

Identical seeds therefore give identical streams, and substreams are
statistically independent.
"""

from __future__ import annotations

import zlib
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import ContractViolation


class Rng:
    """
    Deterministic random stream with splitting.

    Args:
        seed (int): 64-bit seed
        path (Tuple[int, ...]): Spawn key identifying the substream
    """

    def __init__(self, seed: int, path: Tuple[int, ...] = ()) -> None:
        self.seed = int(seed)
        self.path = tuple(path)
        self._split_counter = 0
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, path={self.path})"

    def split(self) -> Rng:
        """Next numbered child stream."""
        child = Rng(self.seed, self.path + (self._split_counter,))
        self._split_counter += 1
        return child

    def child(self, name: str) -> Rng:
        """Named child stream, independent of split order."""
        return Rng(self.seed, self.path + (zlib.crc32(name.encode("utf-8")),))

    # ------------------------------------------------------------------ #
    # Draws
    # ------------------------------------------------------------------ #
    def integers(self, low: int, high: Optional[int] = None, size: Any = None) -> Any:
        """Uniform integers in ``[low, high)``."""
        return self.generator.integers(low, high, size=size)

    def random(self, size: Any = None) -> Any:
        return self.generator.random(size)

    def normal(self, mean: float, sd: float) -> float:
        return float(self.generator.normal(mean, sd))

    def uniform(self, low: float, high: float, size: Any = None) -> Any:
        return self.generator.uniform(low, high, size)

    def choice(self, population: Any, size: Any = None, replace: bool = True) -> Any:
        return self.generator.choice(population, size=size, replace=replace)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def weighted_index(self, weights: Sequence[int]) -> int:
        """Index drawn with probability proportional to exact integer ``weights``."""
        total = int(sum(weights))
        target = int(self.generator.integers(0, total))
        running = 0
        for index, weight in enumerate(weights):
            running += int(weight)
            if target < running:
                return index
        return len(weights) - 1

    # ------------------------------------------------------------------ #
    # Persistence
    # ------------------------------------------------------------------ #
    def get_state(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "path": list(self.path),
            "split_counter": self._split_counter,
            "bit_generator": self.generator.bit_generator.state,
        }

    def load_state(self, state: Dict[str, Any]) -> None:
        """
        Continue from a state saved by :meth:`get_state`.

        Raises:
            ContractViolation: If the state belongs to another seed or substream
        """
        if int(state["seed"]) != self.seed or tuple(state["path"]) != self.path:
            raise ContractViolation(
                "stream state for seed {seed} path {path} cannot restore {rng}",
                params={"seed": state["seed"], "path": tuple(state["path"]), "rng": self},
            )
        self._split_counter = int(state["split_counter"])
        self.generator.bit_generator.state = state["bit_generator"]
