"""Paired teacher-forced baseline."""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from ..core.checkpoint import Checkpoint
from ..core.exceptions import ContractViolation, DataError
from ..core.optim import Adam, AdamConfig
from ..data.batching import batch_indices, make_batch
from ..objectives.losses import nll_seq2seq_loss
from .base_controller import BaseController
from .curriculum import CurriculumState, curriculum_advance

logger = logging.getLogger(__name__)


class Seq2SeqController(BaseController[Checkpoint]):
    """
    Supervised ``x -> y`` training with Adam on the per-token likelihood.

    With the curriculum enabled, pairs are clipped to the current length and
    the length grows every ``max_epochs_at_level`` epochs; there is no critic,
    so the accuracy trigger never fires.
    """

    def run(
        self,
        bad: Sequence[Sequence[int]],
        good: Sequence[Sequence[int]],
        pretrained: Optional[Checkpoint] = None,
        resume: Optional[Checkpoint] = None,
    ) -> Checkpoint:
        """
        Train on aligned pairs, continuing after the stored epoch when ``resume`` is given.

        Raises:
            DataError: If the two sides have different lengths
            ContractViolation: If there are no pairs
            ConfigurationError: If ``pretrained`` or ``resume`` does not match the run
            CheckpointError: If ``resume`` lacks part of the run state
        """
        if len(bad) != len(good):
            raise DataError(
                "paired data differs in length: {a} vs {b}", params={"a": len(bad), "b": len(good)}
            )
        if not bad:
            raise ContractViolation("seq2seq training needs at least one pair")
        config = self.config
        generator = self.build_generator(pretrained if resume is None else None)
        optimizer = Adam(generator.parameters(), AdamConfig(lr=config.optim.lr_seq2seq))
        state = CurriculumState.initial(config.curriculum, config.task_max_len)
        shuffle_rng = self.rng.child("shuffle")
        start = 0
        if resume is not None:
            start = self.restore_run(resume, {"generator": generator}, {"opt_g": optimizer}, {"shuffle": shuffle_rng})
            state = CurriculumState.from_dict(resume.meta["curriculum"])
        logger.info(f"Seq2seq training on {len(bad)} pairs for {config.epochs} epochs")

        for epoch in range(start + 1, config.epochs + 1):
            length = state.length
            losses = []
            for batch_index, index in enumerate(batch_indices(len(bad), config.batch_size, shuffle_rng)):
                src = make_batch([bad[i] for i in index], self.vocab, length)
                tgt = make_batch([good[i] for i in index], self.vocab, length)
                rows = generator.teacher_forced_rows(src.ids, src.mask, tgt.ids)
                loss = nll_seq2seq_loss(rows, tgt.ids, tgt.mask)
                losses.append(self.ensure_finite(float(loss.data), "nll", batch_index, epoch))
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()

            self.log_row(
                {
                    "epoch": epoch,
                    "curriculum_length": length,
                    "first_batch_nll": losses[0],
                    "nll": float(np.mean(losses)),
                }
            )
            if config.curriculum.enabled and not state.complete:
                state = curriculum_advance(
                    state,
                    None,
                    state.epochs_at_level + 1,
                    step=config.curriculum.step,
                    max_epochs=config.curriculum.max_epochs_at_level,
                )

        checkpoint = self.build_checkpoint(
            {"generator": generator},
            {"opt_g": optimizer},
            {"shuffle": shuffle_rng},
            epoch=config.epochs,
            stage="train",
            model=config.model.value,
            curriculum=state.to_dict(),
        )
        self.save(checkpoint, "train_checkpoint")
        self.write_metrics("train_metrics")
        return checkpoint
