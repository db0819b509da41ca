from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Any, Dict, Generic, List, Mapping, Optional, TypeVar, Union

import pandas as pd

from ..core.checkpoint import Checkpoint, save_checkpoint
from ..core.exceptions import CheckpointError, ConfigurationError, ContractViolation, TrainingDivergedError
from ..core.models import TrainConfig, load_config
from ..core.optim import Optimizer
from ..data.rng import Rng
from ..data.vocab import Vocab
from ..metrics.report import write_table
from ..models.base_model import ParameterStore
from ..models.critic import ConvCritic
from ..models.generator import Seq2SeqGenerator
from ..settings import FILE_NAMES

ResultType = TypeVar("ResultType")

logger = logging.getLogger(__name__)


class BaseController(Generic[ResultType]):
    """
    Shared plumbing for every workflow: seeded streams, model construction,
    per-epoch metric rows and checkpoint assembly.

    Attributes:
        config (TrainConfig): Validated run configuration
        out_dir (Path): Directory receiving checkpoints and CSVs
        vocab (Vocab): Task vocabulary
        rng (Rng): Root stream seeded from ``config.seed``
    """

    def __init__(self, config: TrainConfig, out_dir: Union[str, Path]):
        """
        Initialize the controller.

        Args:
            config (TrainConfig): Run configuration
            out_dir (Union[str, Path]): Output directory, created when missing
        """
        self.config = config
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.vocab = Vocab.for_task(config)
        self.rng = Rng(config.seed)
        self.rows: List[Dict[str, Any]] = []

    def run(self, *args: Any, **kwargs: Any) -> ResultType:
        raise NotImplementedError

    # ------------------------------------------------------------------ #
    # Models
    # ------------------------------------------------------------------ #
    def build_generator(self, pretrained: Optional[Checkpoint] = None) -> Seq2SeqGenerator:
        """Fresh generator, or one restored from the ``generator/`` section of ``pretrained``."""
        generator = Seq2SeqGenerator(self.vocab.size, self.config.generator, self.rng.child("generator-init"))
        if pretrained is not None:
            self.check_compatible(pretrained)
            self.load_params(generator, pretrained.section("generator"), "generator")
        return generator

    def build_critic(self, width: Optional[int] = None, depth: Optional[int] = None) -> ConvCritic:
        critic_config = self.config.critic
        if depth is not None:
            critic_config = critic_config.model_copy(update={"depth": depth})
        return ConvCritic(self.vocab.size, critic_config, self.rng.child(f"critic-init-{critic_config.depth}"), width)

    def check_compatible(self, checkpoint: Checkpoint) -> None:
        """
        Raises:
            ConfigurationError: If the checkpoint was trained for another task or vocabulary
        """
        task = checkpoint.meta.get("task")
        size = checkpoint.meta.get("vocab_size")
        if task != self.config.task.value or size != self.vocab.size:
            raise ConfigurationError(
                "checkpoint is for task {task} with {size} tokens, expected {etask} with {esize}",
                field_name="checkpoint",
                params={"task": task, "size": size, "etask": self.config.task.value, "esize": self.vocab.size},
            )

    @staticmethod
    def load_params(model: ParameterStore, arrays: Mapping[str, Any], label: str) -> None:
        try:
            model.load_dict(arrays)
        except ContractViolation as e:
            raise ConfigurationError(f"{label} checkpoint does not match the configured architecture: {e}") from e

    # ------------------------------------------------------------------ #
    # Metrics
    # ------------------------------------------------------------------ #
    def log_row(self, row: Dict[str, Any]) -> None:
        self.rows.append(row)
        shown = ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items())
        logger.info(shown)

    def write_metrics(self, key: str, header: Optional[Mapping[str, object]] = None) -> Path:
        return write_table(pd.DataFrame(self.rows), self.out_dir / FILE_NAMES[key], header)

    def metrics_snapshot(self) -> Dict[str, List[Any]]:
        """Logged rows as column names plus value lists (the checkpoint trailer sorts dict keys)."""
        columns = list(self.rows[0]) if self.rows else []
        return {"columns": columns, "rows": [[row.get(c) for c in columns] for row in self.rows]}

    @staticmethod
    def ensure_finite(value: float, name: str, batch_index: int, epoch: int) -> float:
        if not math.isfinite(value):
            logger.error(f"{name} became {value} at epoch {epoch}, batch {batch_index}")
            raise TrainingDivergedError(f"{name} loss is {value}", batch_index=batch_index, epoch=epoch)
        return value

    # ------------------------------------------------------------------ #
    # Checkpoints
    # ------------------------------------------------------------------ #
    def build_checkpoint(
        self,
        models: Mapping[str, ParameterStore],
        optimizers: Optional[Mapping[str, Optimizer]] = None,
        streams: Optional[Mapping[str, Rng]] = None,
        **meta: Any,
    ) -> Checkpoint:
        """
        Assemble parameters, optimizer slots and the run state.

        The metadata carries everything :meth:`restore_run` needs to continue
        training: optimizer steps and learning rates, the named random
        streams and the metric rows logged so far.
        """
        checkpoint = Checkpoint()
        for prefix, model in models.items():
            checkpoint.add_section(prefix, model.to_dict())
        optimizer_meta: Dict[str, Dict[str, float]] = {}
        for prefix, optimizer in (optimizers or {}).items():
            checkpoint.add_section(prefix, optimizer.state_arrays())
            optimizer_meta[prefix] = {"step": optimizer.state.step, "lr": optimizer.lr}
        checkpoint.meta = {
            "config": self.config.snapshot(),
            "task": self.config.task.value,
            "vocab_size": self.vocab.size,
            "seed": self.config.seed,
            "optimizers": optimizer_meta,
            "streams": {name: rng.get_state() for name, rng in (streams or {}).items()},
            "metrics": self.metrics_snapshot(),
            **meta,
        }
        return checkpoint

    def restore_run(
        self,
        checkpoint: Checkpoint,
        models: Mapping[str, ParameterStore],
        optimizers: Mapping[str, Optimizer],
        streams: Mapping[str, Rng],
    ) -> int:
        """
        Put a ``train`` checkpoint of the same model and seed back in place.

        Parameters, optimizer slots and learning rates, the named streams and
        the logged metric rows are restored.

        Returns:
            int: Number of epochs the checkpoint had completed

        Raises:
            ConfigurationError: If the checkpoint belongs to another task, model,
                stage or seed, or already ran past ``config.epochs``
            CheckpointError: If the checkpoint lacks part of the run state
        """
        self.check_compatible(checkpoint)
        meta = checkpoint.meta
        if meta.get("stage") != "train" or meta.get("model") != self.config.model.value:
            raise ConfigurationError(
                "cannot resume {model} training from a {stage} checkpoint of {other}",
                field_name="resume",
                params={"model": self.config.model.value, "stage": meta.get("stage"), "other": meta.get("model")},
            )
        if meta.get("seed") != self.config.seed:
            raise ConfigurationError(
                "checkpoint was trained with seed {seed}, not {expected}",
                field_name="seed",
                params={"seed": meta.get("seed"), "expected": self.config.seed},
            )
        missing = [key for key in ("epoch", "optimizers", "streams", "metrics", "curriculum") if key not in meta]
        if missing:
            raise CheckpointError("checkpoint lacks the run state entries {keys}", params={"keys": ", ".join(missing)})
        try:
            epoch = int(meta["epoch"])
            for prefix, model in models.items():
                self.load_params(model, checkpoint.section(prefix), prefix)
            for prefix, optimizer in optimizers.items():
                scalars = meta["optimizers"][prefix]
                optimizer.load_state(scalars["step"], checkpoint.section(prefix), lr=scalars["lr"])
            for name, stream in streams.items():
                stream.load_state(meta["streams"][name])
            columns = meta["metrics"]["columns"]
            rows = [dict(zip(columns, values)) for values in meta["metrics"]["rows"]]
        except KeyError as e:
            raise CheckpointError("checkpoint lacks the run state entry {key}", params={"key": e.args[0]}) from e
        if epoch > self.config.epochs:
            raise ConfigurationError(
                "checkpoint already trained {epoch} epochs, more than the configured {epochs}",
                field_name="epochs",
                params={"epoch": epoch, "epochs": self.config.epochs},
            )
        self.rows = rows
        logger.info(f"Resuming {self.config.model.value} training after epoch {epoch}")
        return epoch

    def save(self, checkpoint: Checkpoint, key: str) -> Path:
        return save_checkpoint(checkpoint, self.out_dir / FILE_NAMES[key])


def config_from_checkpoint(checkpoint: Checkpoint, **overrides: Any) -> TrainConfig:
    """Configuration a checkpoint was trained with, optionally overridden."""
    if "config" not in checkpoint.meta:
        raise ConfigurationError("checkpoint carries no configuration snapshot")
    return load_config(checkpoint.meta["config"], **overrides)
