"""Test-set evaluation of a trained generator."""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..core.checkpoint import Checkpoint
from ..core.exceptions import ConfigurationError, ContractViolation
from ..core.models import Task
from ..data.grammar import default_grammar
from ..data.sorting import sort_oracle
from ..metrics.accuracy import cfg_validity_rate, order_accuracy, sequence_accuracy
from ..metrics.bleu import bleu4
from ..metrics.report import EvalReport
from ..models.inference import repair
from ..settings import FILE_NAMES
from .base_controller import BaseController

logger = logging.getLogger(__name__)


def decode_limits(sources: Sequence[Sequence[int]], task_max_len: int) -> np.ndarray:
    """Row cap per source: ``min(ceil(1.5 * len(x)) + 5, task_max_len + 1)``."""
    return np.array([min(math.ceil(1.5 * len(x)) + 5, task_max_len + 1) for x in sources], dtype=np.int64)


class EvaluationController(BaseController[EvalReport]):
    """
    Repair every test input and score the task's metric set.

    Sorting reports sequence accuracy against the sort oracle and order
    accuracy. The grammar task reports BLEU-4 against the original
    sentences and the recognizer validity rate.
    """

    def run(
        self,
        checkpoint: Checkpoint,
        bad: Sequence[Sequence[int]],
        good: Optional[Sequence[Sequence[int]]] = None,
    ) -> EvalReport:
        """
        Raises:
            ConfigurationError: If the checkpoint does not match the task vocabulary,
                or grammar references are missing
            ContractViolation: If the test set is empty
        """
        if not bad:
            raise ContractViolation("evaluation needs at least one test input")
        generator = self.build_generator()
        self.check_compatible(checkpoint)
        self.load_params(generator, checkpoint.section("generator"), "generator")

        limits = decode_limits(bad, self.config.task_max_len)
        preds = repair(generator, self.vocab, bad, limits, self.config.eval_batch_size)
        report = EvalReport(task=self.config.task.value, count=len(preds))
        if self.config.task is Task.SORT:
            report.add("sequence_accuracy", sequence_accuracy(preds, [sort_oracle(x) for x in bad]))
            report.add("order_accuracy", order_accuracy(preds))
        else:
            if good is None:
                raise ConfigurationError("grammar evaluation needs the original sentences", field_name="good")
            report.add("bleu4", bleu4(preds, good))
            report.add("cfg_validity", cfg_validity_rate(preds, default_grammar()))

        for metric, value in report.values.items():
            logger.info(f"{metric}: {value:.4f}")
        report.write_csv(self.out_dir / FILE_NAMES["eval_report"])
        return report
