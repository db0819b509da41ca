"""Denoising-autoencoder pretraining of the generator."""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence

import numpy as np

from ..core.checkpoint import Checkpoint
from ..core.exceptions import ContractViolation
from ..core.optim import Adam, AdamConfig
from ..core.tensor import no_grad
from ..data.batching import batch_indices, make_batch
from ..data.noise import noise_sequence
from ..data.rng import Rng
from ..models.generator import Seq2SeqGenerator
from ..objectives.losses import denoise_pretrain_loss
from .base_controller import BaseController

logger = logging.getLogger(__name__)


class PretrainController(BaseController[Checkpoint]):
    """
    Train the generator to reconstruct clean sequences from noised copies.

    With ten or more sequences the last tenth of the good data is held out
    and its denoising loss is logged next to the training loss.
    """

    def denoise_batch(
        self, generator: Seq2SeqGenerator, clean: Sequence[Sequence[int]], noise_rng: Rng
    ):
        data = self.config.data
        noised = [noise_sequence(y, noise_rng, data.noise_drop, data.noise_rate) for y in clean]
        src = make_batch(noised, self.vocab)
        tgt = make_batch(clean, self.vocab)
        rows = generator.teacher_forced_rows(src.ids, src.mask, tgt.ids)
        return denoise_pretrain_loss(rows, tgt.ids, tgt.mask)

    def heldout_loss(self, generator: Seq2SeqGenerator, heldout: List[List[int]]) -> Optional[float]:
        if not heldout:
            return None
        noise_rng = self.rng.child("heldout-noise")
        total = weight = 0.0
        with no_grad():
            for index in batch_indices(len(heldout), self.config.eval_batch_size):
                chunk = [heldout[i] for i in index]
                total += float(self.denoise_batch(generator, chunk, noise_rng).data) * len(chunk)
                weight += len(chunk)
        return total / weight

    def run(self, good: Sequence[Sequence[int]]) -> Checkpoint:
        """
        Pretrain on ``good`` and write ``pretrain.ckpt`` plus the metrics CSV.

        Raises:
            ContractViolation: If the dataset is empty
            TrainingDivergedError: If the loss stops being finite
        """
        if not good:
            raise ContractViolation("pretraining needs a non-empty dataset")
        sequences = [list(y) for y in good]
        n_heldout = len(sequences) // 10 if len(sequences) >= 10 else 0
        train = sequences[: len(sequences) - n_heldout]
        heldout = sequences[len(sequences) - n_heldout :]

        generator = self.build_generator()
        optimizer = Adam(generator.parameters(), AdamConfig(lr=self.config.optim.lr_pretrain))
        shuffle_rng = self.rng.child("shuffle")
        noise_rng = self.rng.child("noise")
        logger.info(
            f"Pretraining {generator.num_parameters()} parameters on {len(train)} sequences "
            f"for {self.config.pretrain_epochs} epochs"
        )

        for epoch in range(1, self.config.pretrain_epochs + 1):
            losses = []
            for batch_index, index in enumerate(batch_indices(len(train), self.config.batch_size, shuffle_rng)):
                loss = self.denoise_batch(generator, [train[i] for i in index], noise_rng)
                self.ensure_finite(float(loss.data), "pretrain", batch_index, epoch)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                losses.append(float(loss.data))
            self.log_row(
                {
                    "epoch": epoch,
                    "pretrain_loss": float(np.mean(losses)),
                    "heldout_loss": self.heldout_loss(generator, heldout),
                }
            )

        checkpoint = self.build_checkpoint(
            {"generator": generator},
            {"opt_g": optimizer},
            {"shuffle": shuffle_rng, "noise": noise_rng},
            epoch=self.config.pretrain_epochs,
            stage="pretrain",
        )
        self.save(checkpoint, "pretrain_checkpoint")
        self.write_metrics("pretrain_metrics")
        return checkpoint
