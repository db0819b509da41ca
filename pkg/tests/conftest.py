import json

import numpy as np
import pytest

from seqrepair_kit.core.models import TrainConfig, load_config
from seqrepair_kit.data.rng import Rng
from seqrepair_kit.data.vocab import Vocab

TINY_CONFIG = {
    "task": "sort",
    "model": "gan-base",
    "lambda": 1.0,
    "clip": 0.05,
    "epochs": 3,
    "pretrain_epochs": 2,
    "batch_size": 8,
    "eval_batch_size": 16,
    "diagnose_epochs": 2,
    "diagnose_interval": 1,
    "seed": 7,
    "generator": {"layers": 1, "hidden": 8},
    "critic": {"depth": 1, "kernel_sizes": [3, 5], "filters": 4, "deep_channels": 4, "fc_units": 8},
    "curriculum": {
        "enabled": True,
        "start": 2,
        "step": 1,
        "accuracy_threshold": 0.55,
        "max_epochs_at_level": 1,
        "retrain_epochs": 1,
        "probe_size": 8,
    },
    "optim": {"critic_ratio": 2, "warmup_epochs": 1, "decay_every": 1, "lr_seq2seq": 1e-2, "lr_pretrain": 1e-2},
    "data": {
        "sort_length": 4,
        "sort_max_value": 9,
        "sort_error_mean": 1,
        "sort_error_sd": 1,
        "cfg_error_mean": 1,
        "cfg_error_sd": 1,
        "num_train": 40,
        "num_test": 10,
    },
}


@pytest.fixture
def rng() -> Rng:
    return Rng(1234)


@pytest.fixture
def np_rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture
def sort_vocab() -> Vocab:
    return Vocab.for_sorting(9)


@pytest.fixture
def tiny_payload() -> dict:
    return json.loads(json.dumps(TINY_CONFIG))


@pytest.fixture
def tiny_config(tiny_payload) -> TrainConfig:
    return load_config(tiny_payload)


@pytest.fixture
def tiny_config_file(tmp_path, tiny_payload):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(tiny_payload), encoding="utf-8")
    return path
