"""Adversarial training of the generator against the clipped Wasserstein critic."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.checkpoint import Checkpoint
from ..core.exceptions import ContractViolation
from ..core.models import AutoSource, RegMode
from ..core.optim import RMSprop, RMSpropConfig, clip_weights
from ..core.tensor import Tensor, no_grad
from ..data.batching import make_batch, num_batches
from ..data.rng import Rng
from ..metrics.diagnostics import critic_accuracy
from ..models.critic import ConvCritic
from ..models.generator import Seq2SeqGenerator
from ..models.inference import fake_critic_rows, generate_soft, real_critic_rows, score_pairs
from ..objectives.losses import LossReport, auto_loss, combined_generator_loss, freq_loss, wgan_losses
from .base_controller import BaseController
from .curriculum import CurriculumState, curriculum_advance

logger = logging.getLogger(__name__)


@dataclass
class EpochStats:
    critic_steps: int = 0
    generator_steps: int = 0
    wgan_d: List[float] = field(default_factory=list)
    wgan_g: List[float] = field(default_factory=list)
    reg: List[float] = field(default_factory=list)

    @staticmethod
    def mean(values: List[float]) -> Optional[float]:
        return float(np.mean(values)) if values else None


class GanController(BaseController[Checkpoint]):
    """
    Alternating WGAN training on unpaired data.

    An epoch is split into rounds of ``critic_ratio`` critic updates followed
    by one generator update, with ``max(1, batches // critic_ratio)`` rounds
    per epoch. Warm-up epochs and the retraining epochs after each
    curriculum advance skip the generator update.
    """

    def __init__(self, config, out_dir):
        super().__init__(config, out_dir)
        self.reg_mode = config.model.reg_mode
        self.batch_rng = self.rng.child("batches")
        self.probe_rng = self.rng.child("probe")

    @property
    def streams(self) -> Dict[str, Rng]:
        return {"batches": self.batch_rng, "probe": self.probe_rng}

    # ------------------------------------------------------------------ #
    # Steps
    # ------------------------------------------------------------------ #
    def draw(self, data: Sequence[Sequence[int]], size: Optional[int] = None, rng: Optional[Rng] = None):
        rng = rng or self.batch_rng
        size = min(size or self.config.batch_size, len(data))
        return [data[int(i)] for i in rng.choice(len(data), size=size, replace=False)]

    def critic_step(
        self,
        critic: ConvCritic,
        generator: Seq2SeqGenerator,
        optimizer: RMSprop,
        bad: Sequence[Sequence[int]],
        good: Sequence[Sequence[int]],
        length: int,
    ) -> float:
        width = length + 2
        with no_grad():
            soft = generate_soft(generator, self.vocab, self.draw(bad), length + 1, clip=length)
        real_scores = critic.score(real_critic_rows(self.vocab, self.draw(good), width))
        fake_scores = critic.score(fake_critic_rows(soft, width, self.vocab.size))
        critic_loss, _ = wgan_losses(real_scores, fake_scores)
        optimizer.zero_grad()
        critic_loss.backward()
        optimizer.step()
        clip_weights(critic.parameters(), self.config.clip)
        return float(critic_loss.data)

    def regularizer(
        self,
        generator: Seq2SeqGenerator,
        sources: Sequence[Sequence[int]],
        soft,
        good: Sequence[Sequence[int]],
        length: int,
    ) -> Optional[Tensor]:
        if self.reg_mode is RegMode.FREQ:
            src = make_batch(sources, self.vocab, length)
            return freq_loss(src.ids, soft.rows, soft.lengths, soft.ended)
        if self.reg_mode is RegMode.AUTO:
            seqs = self.draw(good) if self.config.auto_source is AutoSource.GOOD else sources
            batch = make_batch(seqs, self.vocab, length)
            rows = generator.teacher_forced_rows(batch.ids, batch.mask, batch.ids)
            return auto_loss(rows, batch.ids, batch.mask)
        return None

    def generator_step(
        self,
        critic: ConvCritic,
        generator: Seq2SeqGenerator,
        optimizer: RMSprop,
        bad: Sequence[Sequence[int]],
        good: Sequence[Sequence[int]],
        length: int,
    ) -> LossReport:
        sources = self.draw(bad)
        soft = generate_soft(generator, self.vocab, sources, length + 1, clip=length)
        fake_scores = critic.score(fake_critic_rows(soft, length + 2, self.vocab.size))
        wgan_g = -fake_scores.mean()
        reg = self.regularizer(generator, sources, soft, good, length)
        total = combined_generator_loss(wgan_g, reg if reg is not None else 0.0, self.reg_mode, self.config.lam)
        optimizer.zero_grad()
        critic.zero_grad()
        total.backward()
        optimizer.step()
        critic.zero_grad()
        report = LossReport(lam=self.config.lam, wgan_g=float(wgan_g.data))
        if reg is not None:
            setattr(report, self.reg_mode.value, float(reg.data))
        return report

    def probe_accuracy(
        self,
        critic: ConvCritic,
        generator: Seq2SeqGenerator,
        bad: Sequence[Sequence[int]],
        good: Sequence[Sequence[int]],
        length: int,
    ) -> float:
        size = min(self.config.curriculum.probe_size, len(bad), len(good))
        sources = self.draw(bad, size, self.probe_rng)
        targets = self.draw(good, size, self.probe_rng)
        real, fake, _ = score_pairs(
            critic, generator, self.vocab, sources, targets, length + 2, self.config.eval_batch_size
        )
        return critic_accuracy(real, fake)

    # ------------------------------------------------------------------ #
    # Training loop
    # ------------------------------------------------------------------ #
    def run(
        self,
        bad: Sequence[Sequence[int]],
        good: Sequence[Sequence[int]],
        pretrained: Optional[Checkpoint] = None,
        resume: Optional[Checkpoint] = None,
    ) -> Checkpoint:
        """
        Train and write ``train.ckpt`` plus the per-epoch metrics CSV.

        With ``resume``, training continues after the epoch stored in that
        ``train.ckpt``; ``pretrained`` is then ignored.

        Raises:
            ContractViolation: If either dataset is empty
            ConfigurationError: If ``pretrained`` or ``resume`` does not match the run
            CheckpointError: If ``resume`` lacks part of the run state
            TrainingDivergedError: If a loss stops being finite
        """
        if not bad or not good:
            raise ContractViolation("adversarial training needs non-empty good and bad datasets")
        config = self.config
        if pretrained is None and resume is None:
            logger.warning("No pretrained generator given; starting from a fresh initialisation")
        generator = self.build_generator(pretrained if resume is None else None)
        state = CurriculumState.initial(config.curriculum, config.task_max_len)
        critic = self.build_critic(width=state.length + 2)
        clip_weights(critic.parameters(), config.clip)

        opt_d = RMSprop(critic.parameters(), RMSpropConfig(lr=config.optim.lr_critic))
        opt_g = RMSprop(generator.parameters(), RMSpropConfig(lr=config.optim.lr_generator))
        ratio = config.optim.critic_ratio
        rounds = max(1, num_batches(min(len(bad), len(good)), config.batch_size) // ratio)
        retrain_left = 0
        epochs_complete = 0
        start = 0
        if resume is not None:
            start = self.restore_run(
                resume, {"generator": generator, "critic": critic}, {"opt_g": opt_g, "opt_d": opt_d}, self.streams
            )
            state = CurriculumState.from_dict(resume.meta["curriculum"])
            progress = resume.meta.get("progress", {})
            retrain_left = int(progress.get("retrain_left", 0))
            epochs_complete = int(progress.get("epochs_complete", 0))
        logger.info(
            f"Training {config.model.value} on {len(bad)} bad / {len(good)} good sequences, "
            f"{rounds} rounds x {ratio} critic steps per epoch"
        )

        for epoch in range(start + 1, config.epochs + 1):
            length = state.length
            critic.width = length + 2
            warmup = epoch <= config.optim.warmup_epochs
            phase = "warmup" if warmup else "retrain" if retrain_left > 0 else "adversarial"
            stats = EpochStats()

            for round_index in range(rounds):
                for k in range(ratio):
                    batch_index = round_index * ratio + k
                    value = self.critic_step(critic, generator, opt_d, bad, good, length)
                    LossReport(wgan_d=value).check_finite(batch_index, epoch)
                    stats.wgan_d.append(value)
                    stats.critic_steps += 1
                if phase != "adversarial":
                    continue
                report = self.generator_step(critic, generator, opt_g, bad, good, length)
                report.check_finite(round_index, epoch)
                stats.wgan_g.append(report.wgan_g)
                reg_value = getattr(report, self.reg_mode.value, None)
                if reg_value is not None:
                    stats.reg.append(reg_value)
                stats.generator_steps += 1

            accuracy = self.probe_accuracy(critic, generator, bad, good, length)
            if phase == "retrain":
                retrain_left -= 1
            elif phase == "adversarial":
                if config.curriculum.enabled and not state.complete:
                    cur = config.curriculum
                    state = curriculum_advance(
                        state,
                        accuracy,
                        state.epochs_at_level + 1,
                        step=cur.step,
                        threshold=cur.accuracy_threshold,
                        max_epochs=cur.max_epochs_at_level,
                    )
                    if state.length > length:
                        retrain_left = cur.retrain_epochs
                        logger.info(f"Curriculum advanced to length {state.length} (critic accuracy {accuracy:.3f})")
                if state.complete:
                    epochs_complete += 1
                    if epochs_complete % config.optim.decay_every == 0:
                        opt_g.lr = opt_g.lr * config.optim.generator_decay

            self.log_row(
                {
                    "epoch": epoch,
                    "phase": phase,
                    "curriculum_length": length,
                    "critic_steps": stats.critic_steps,
                    "generator_steps": stats.generator_steps,
                    "wgan_d": EpochStats.mean(stats.wgan_d),
                    "wgan_g": EpochStats.mean(stats.wgan_g),
                    "reg": EpochStats.mean(stats.reg),
                    "critic_accuracy": accuracy,
                    "lr_generator": opt_g.lr,
                    "critic_max_abs": critic.max_abs(),
                }
            )

        checkpoint = self.build_checkpoint(
            {"generator": generator, "critic": critic},
            {"opt_g": opt_g, "opt_d": opt_d},
            self.streams,
            epoch=config.epochs,
            stage="train",
            model=config.model.value,
            curriculum=state.to_dict(),
            progress={"retrain_left": retrain_left, "epochs_complete": epochs_complete},
        )
        self.save(checkpoint, "train_checkpoint")
        self.write_metrics("train_metrics")
        return checkpoint
