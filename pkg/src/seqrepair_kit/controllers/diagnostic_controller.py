"""Critic diagnostics against a frozen generator."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Sequence

import pandas as pd

from ..core.checkpoint import Checkpoint
from ..core.exceptions import ConfigurationError, ContractViolation
from ..core.optim import RMSprop, RMSpropConfig, clip_weights
from ..data.batching import num_batches
from ..metrics.diagnostics import export_filter_weights, loss_ratio_diagnostic, mean_filter_sparsity
from ..metrics.report import write_table
from ..settings import FILE_NAMES
from .gan_controller import GanController

logger = logging.getLogger(__name__)

RATIO_ORIENTATION = "value_incorrect/value_correct"


class DiagnosticController(GanController):
    """
    Train a fresh critic of a given depth against a frozen generator and
    record the paired loss ratio over time, then dump its first-layer filters.

    The critic follows the adversarial schedule (RMSprop, clipping, rounds of
    ``critic_ratio`` updates) at the full task length; the generator never moves.
    """

    def run(
        self,
        checkpoint: Checkpoint,
        depth: int,
        bad: Sequence[Sequence[int]],
        good: Sequence[Sequence[int]],
    ) -> Dict[str, Path]:
        """
        Returns:
            Dict[str, Path]: Paths of the loss-ratio and filter-weight CSVs

        Raises:
            ConfigurationError: On an unsupported depth or incompatible checkpoint
            ContractViolation: If the probe set is empty or unpaired
        """
        if depth not in (1, 3):
            raise ConfigurationError("critic depth must be 1 or 3, got {d}", field_name="depth", params={"d": depth})
        if not bad or len(bad) != len(good):
            raise ContractViolation("diagnostics need a non-empty paired probe set")
        config = self.config
        generator = self.build_generator()
        self.check_compatible(checkpoint)
        self.load_params(generator, checkpoint.section("generator"), "generator")

        length = config.task_max_len
        width = length + 2
        critic = self.build_critic(width=width, depth=depth)
        clip_weights(critic.parameters(), config.clip)
        optimizer = RMSprop(critic.parameters(), RMSpropConfig(lr=config.optim.lr_critic))
        ratio = config.optim.critic_ratio
        rounds = max(1, num_batches(len(bad), config.batch_size) // ratio)
        probe = min(config.curriculum.probe_size, len(bad))
        probe_bad, probe_good = list(bad[:probe]), list(good[:probe])

        def record(epoch: int, steps: int) -> None:
            result = loss_ratio_diagnostic(
                critic, generator, self.vocab, probe_bad, probe_good, width, config.eval_batch_size
            )
            self.log_row({"epoch": epoch, "critic_steps": steps, **result.as_row()})

        steps = 0
        record(0, steps)
        for epoch in range(1, config.diagnose_epochs + 1):
            for batch_index in range(rounds * ratio):
                value = self.critic_step(critic, generator, optimizer, bad, good, length)
                self.ensure_finite(value, "wgan_d", batch_index, epoch)
                steps += 1
            if epoch % config.diagnose_interval == 0 or epoch == config.diagnose_epochs:
                record(epoch, steps)

        header = {"critic_depth": depth, "ratio": RATIO_ORIENTATION}
        ratio_path = write_table(
            pd.DataFrame(self.rows), self.out_dir / FILE_NAMES["loss_ratio"].format(depth=depth), header
        )
        filters_path = write_table(
            export_filter_weights(critic),
            self.out_dir / FILE_NAMES["filter_weights"].format(depth=depth),
            {"critic_depth": depth},
        )
        logger.info(f"Depth-{depth} critic mean filter sparsity: {mean_filter_sparsity(critic):.4f}")
        return {"loss_ratio": ratio_path, "filter_weights": filters_path}
