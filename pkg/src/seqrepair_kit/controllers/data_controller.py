"""Synthetic benchmark generation."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Tuple

from ..core.models import Task
from ..data.grammar import count_cfg_sentences, default_grammar, inject_cfg_errors, sample_cfg_sentence
from ..data.io import write_metadata, write_sequences
from ..data.rng import Rng
from ..data.sorting import gen_sorted_sequence, inject_sort_errors
from ..settings import FILE_NAMES
from .base_controller import BaseController

logger = logging.getLogger(__name__)

Pairs = Tuple[List[List[int]], List[List[int]]]


class DataController(BaseController[Dict[str, Path]]):
    """
    Write train/test splits of (broken, correct) pairs plus ``metadata.json``.

    With ``unpaired`` the training good and bad files come from disjoint
    halves of the generated pairs, so no training input has its repair in
    the good file.
    """

    def generate_pairs(self, count: int, rng: Rng) -> Pairs:
        data = self.config.data
        bad: List[List[int]] = []
        good: List[List[int]] = []
        if self.config.task is Task.SORT:
            for _ in range(count):
                y = gen_sorted_sequence(rng, data.sort_length, data.sort_max_value)
                good.append(y)
                bad.append(inject_sort_errors(y, rng, data.sort_error_mean, data.sort_error_sd))
        else:
            grammar = default_grammar()
            counts = count_cfg_sentences(grammar, data.cfg_max_len)
            terminals = grammar.terminal_labels
            for _ in range(count):
                y = sample_cfg_sentence(rng, grammar, counts)
                good.append(y)
                bad.append(inject_cfg_errors(y, rng, terminals, data.cfg_error_mean, data.cfg_error_sd))
        return bad, good

    def run(self, unpaired: bool = False) -> Dict[str, Path]:
        data = self.config.data
        train_bad, train_good = self.generate_pairs(data.num_train, self.rng.child("train-data"))
        test_bad, test_good = self.generate_pairs(data.num_test, self.rng.child("test-data"))
        if unpaired:
            half = len(train_good) // 2
            train_good, train_bad = train_good[:half], train_bad[half:]

        paths = {
            "train_bad": write_sequences(self.out_dir / FILE_NAMES["train_bad"], train_bad),
            "train_good": write_sequences(self.out_dir / FILE_NAMES["train_good"], train_good),
            "test_bad": write_sequences(self.out_dir / FILE_NAMES["test_bad"], test_bad),
            "test_good": write_sequences(self.out_dir / FILE_NAMES["test_good"], test_good),
        }
        metadata = {
            "task": self.config.task.value,
            "vocab_size": self.vocab.size,
            "seed": self.config.seed,
            "unpaired": unpaired,
            "num_train": len(train_bad),
            "num_test": len(test_bad),
            "data": data.model_dump(mode="json"),
        }
        paths["metadata"] = write_metadata(self.out_dir / FILE_NAMES["metadata"], metadata)
        logger.info(f"Wrote {len(train_bad)} training and {len(test_bad)} test pairs to {self.out_dir}")
        return paths
