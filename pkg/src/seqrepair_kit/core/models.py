"""
Core Pydantic models for seqrepair-kit.
Provides strongly typed configuration and validation for training runs.
"""

from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .exceptions import ConfigurationError


# =============================================================================
# Enumerations
# =============================================================================


class Task(str, Enum):
    """Benchmark tasks."""

    SORT = "sort"
    CFG = "cfg"


class ModelKind(str, Enum):
    """Trainable model variants."""

    GAN_BASE = "gan-base"
    GAN_AUTO = "gan-auto"
    GAN_FREQ = "gan-freq"
    SEQ2SEQ = "seq2seq"

    @property
    def is_gan(self) -> bool:
        return self is not ModelKind.SEQ2SEQ

    @property
    def reg_mode(self) -> "RegMode":
        return {
            ModelKind.GAN_AUTO: RegMode.AUTO,
            ModelKind.GAN_FREQ: RegMode.FREQ,
        }.get(self, RegMode.BASE)


class RegMode(str, Enum):
    """Generator loss combinations."""

    BASE = "base"
    AUTO = "auto"
    FREQ = "freq"


class AutoSource(str, Enum):
    """Which data the autoencoder regularizer reconstructs."""

    GOOD = "good"
    BAD = "bad"


# =============================================================================
# Section Models
# =============================================================================


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class GeneratorConfig(_StrictModel):
    """Encoder-decoder size; the embedding width equals the hidden width."""

    layers: int = Field(3, ge=1)
    hidden: int = Field(512, ge=1)


class CriticConfig(_StrictModel):
    """Convolutional critic shape."""

    depth: int = 1
    kernel_sizes: List[int] = Field(default_factory=lambda: [3, 7, 11])
    filters: int = Field(300, ge=1)
    deep_kernel: int = Field(3, ge=1)
    deep_channels: int = Field(300, ge=1)
    fc_units: int = Field(512, ge=1)

    @field_validator("depth")
    def validate_depth(cls, value: int) -> int:
        if value not in (1, 3):
            raise ValueError("critic depth must be 1 or 3")
        return value

    @field_validator("kernel_sizes")
    def validate_kernel_sizes(cls, value: List[int]) -> List[int]:
        if not value or any(k < 1 for k in value):
            raise ValueError("kernel_sizes must be a non-empty list of positive widths")
        return value


class CurriculumConfig(_StrictModel):
    """Sequence-length curriculum."""

    enabled: bool = True
    start: int = Field(5, ge=1)
    step: int = Field(2, ge=1)
    accuracy_threshold: float = Field(0.55, ge=0.0, le=1.0)
    max_epochs_at_level: int = Field(40, ge=1)
    retrain_epochs: int = Field(2, ge=0)
    probe_size: int = Field(256, ge=1)


class OptimConfig(_StrictModel):
    """Learning rates and update schedule."""

    lr_critic: float = Field(5e-4, gt=0)
    lr_generator: float = Field(1e-5, gt=0)
    lr_pretrain: float = Field(1e-4, gt=0)
    lr_seq2seq: float = Field(1e-4, gt=0)
    critic_ratio: int = Field(15, ge=1)
    warmup_epochs: int = Field(10, ge=0)
    generator_decay: float = Field(0.9, gt=0, le=1.0)
    decay_every: int = Field(10, ge=1)


class DataConfig(_StrictModel):
    """Synthetic benchmark and noise parameters."""

    sort_length: int = Field(20, ge=2)
    sort_max_value: int = Field(50, ge=1)
    sort_error_mean: float = 8.0
    sort_error_sd: float = Field(4.0, ge=0)
    cfg_max_len: int = Field(20, ge=2)
    cfg_error_mean: float = 5.0
    cfg_error_sd: float = Field(2.0, ge=0)
    noise_drop: float = Field(0.2, ge=0.0, lt=1.0)
    noise_rate: float = Field(0.03, ge=0.0)
    num_train: int = Field(10000, ge=1)
    num_test: int = Field(1000, ge=1)

    @model_validator(mode="after")
    def validate_sort_domain(self) -> "DataConfig":
        """The sorting domain must hold enough distinct values."""
        if self.sort_length > self.sort_max_value + 1:
            raise ValueError("sort_length cannot exceed the number of values in 0..sort_max_value")
        return self


class PathsConfig(_StrictModel):
    """Default locations; CLI flags take precedence."""

    data_dir: Optional[str] = None
    out_dir: Optional[str] = None
    pretrained: Optional[str] = None


# =============================================================================
# Training Configuration
# =============================================================================


class TrainConfig(_StrictModel):
    """
    Every hyperparameter of a run.

    The JSON configuration file mirrors this model field for field; unknown
    keys are rejected. ``lambda`` is accepted as the JSON name of ``lam``.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True, populate_by_name=True)

    task: Task = Task.SORT
    model: ModelKind = ModelKind.GAN_BASE
    lam: float = Field(1.0, ge=0.0, alias="lambda")
    clip: float = Field(0.05, gt=0)
    auto_source: AutoSource = AutoSource.GOOD
    epochs: Optional[int] = Field(None, ge=1)
    pretrain_epochs: int = Field(10, ge=1)
    batch_size: int = Field(64, ge=1)
    eval_batch_size: int = Field(256, ge=1)
    diagnose_epochs: int = Field(20, ge=1)
    diagnose_interval: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    critic: CriticConfig = Field(default_factory=CriticConfig)
    curriculum: CurriculumConfig = Field(default_factory=CurriculumConfig)
    optim: OptimConfig = Field(default_factory=OptimConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)

    @model_validator(mode="after")
    def set_default_epochs(self) -> "TrainConfig":
        """Sorting trains for 200 epochs and the grammar task for 400 unless set."""
        if self.epochs is None:
            object.__setattr__(self, "epochs", 200 if self.task is Task.SORT else 400)
        return self

    @property
    def task_max_len(self) -> int:
        """Longest task sequence (without framework delimiters)."""
        if self.task is Task.SORT:
            return self.data.sort_length
        return self.data.cfg_max_len - 1

    def snapshot(self) -> Dict[str, Any]:
        """JSON-ready dump with stable key names."""
        return self.model_dump(mode="json", by_alias=True)


def load_config(source: Union[str, Path, Dict[str, Any], None] = None, **overrides: Any) -> TrainConfig:
    """
    Load and validate a :class:`TrainConfig`.

    Args:
        source: JSON file path, already-parsed mapping, or None for defaults
        overrides: Top-level fields replacing the loaded values (None values are ignored)

    Returns:
        TrainConfig: Validated configuration

    Raises:
        ConfigurationError: If the file is unreadable or a field is invalid
    """
    if source is None:
        payload: Dict[str, Any] = {}
    elif isinstance(source, dict):
        payload = dict(source)
    else:
        path = Path(source)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read configuration {path}: {e}") from e

    payload.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return TrainConfig.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        field_name = ".".join(str(part) for part in first["loc"]) or None
        raise ConfigurationError(first["msg"], field_name=field_name) from e
