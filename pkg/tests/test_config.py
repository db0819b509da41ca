import json

import pytest

from seqrepair_kit.core.exceptions import ConfigurationError
from seqrepair_kit.core.models import ModelKind, RegMode, Task, load_config
from seqrepair_kit.data.vocab import Vocab
from seqrepair_kit.settings import CONFIGS_DIR


def test_defaults():
    config = load_config()
    assert config.task is Task.SORT
    assert config.epochs == 200
    assert config.clip == 0.05
    assert config.optim.critic_ratio == 15
    assert config.task_max_len == 20
    assert load_config({"task": "cfg"}).epochs == 400
    assert load_config({"task": "cfg"}).task_max_len == 19


def test_lambda_alias_and_snapshot():
    config = load_config({"lambda": 0.5, "model": "gan-freq"})
    assert config.lam == 0.5
    assert config.model.reg_mode is RegMode.FREQ
    snapshot = config.snapshot()
    assert snapshot["lambda"] == 0.5
    assert load_config(snapshot) == config


def test_unknown_key_names_the_field():
    with pytest.raises(ConfigurationError) as err:
        load_config({"optim": {"learning_rate": 0.1}})
    assert "optim.learning_rate" in str(err.value)


@pytest.mark.parametrize(
    "payload",
    [
        {"lambda": -1.0},
        {"clip": 0.0},
        {"critic": {"depth": 2}},
        {"critic": {"kernel_sizes": []}},
        {"data": {"sort_length": 60, "sort_max_value": 50}},
        {"model": "transformer"},
    ],
)
def test_invalid_values(payload):
    with pytest.raises(ConfigurationError):
        load_config(payload)


def test_overrides_skip_none(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 4, "task": "cfg"}))
    assert load_config(path, seed=None).seed == 4
    assert load_config(path, seed=9).seed == 9


def test_unreadable_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigurationError):
        load_config(path)


@pytest.mark.parametrize("name", ["sort_desk.json", "cfg_desk.json", "sort_paper.json", "cfg_paper.json"])
def test_shipped_configs_validate(name):
    config = load_config(CONFIGS_DIR / name)
    assert config.task in (Task.SORT, Task.CFG)


def test_model_kinds():
    assert not ModelKind.SEQ2SEQ.is_gan
    assert ModelKind.GAN_AUTO.reg_mode is RegMode.AUTO
    assert ModelKind.GAN_BASE.reg_mode is RegMode.BASE


def test_task_vocabularies():
    assert Vocab.for_task(load_config()).size == 54
    assert Vocab.for_task(load_config({"task": "cfg"})).size == 26
