import numpy as np
import pytest

from seqrepair_kit.core.exceptions import ConfigurationError, ContractViolation
from seqrepair_kit.core.models import CriticConfig
from seqrepair_kit.core.optim import (
    Adam,
    AdamConfig,
    RMSprop,
    RMSpropConfig,
    SlotState,
    adam_step,
    clip_weights,
    rmsprop_step,
)
from seqrepair_kit.core.tensor import Tensor
from seqrepair_kit.data.rng import Rng
from seqrepair_kit.models.critic import ConvCritic


def test_rmsprop_first_step():
    param, slot = rmsprop_step(np.zeros(1), np.ones(1), SlotState(), RMSpropConfig(lr=0.1))
    assert param[0] == pytest.approx(-0.1 / np.sqrt(0.1), rel=1e-6)
    assert slot.v[0] == pytest.approx(0.1)
    assert slot.step == 1


def test_rmsprop_unit_gradient_step_size():
    param, _ = rmsprop_step(np.zeros(1), np.ones(1), SlotState(), RMSpropConfig(lr=0.01))
    assert param[0] == pytest.approx(-0.0316228, abs=1e-6)


def test_rmsprop_steps_shrink_under_constant_gradient():
    hyper = RMSpropConfig(lr=0.01)
    first, slot = rmsprop_step(np.zeros(1), np.ones(1), SlotState(), hyper)
    second, _ = rmsprop_step(first, np.ones(1), slot, hyper)
    assert abs(second[0] - first[0]) < abs(first[0])


def test_rmsprop_zero_gradient_leaves_parameter():
    start = np.array([0.25, -1.5, 3.0])
    param, slot = rmsprop_step(start.copy(), np.zeros(3), SlotState(), RMSpropConfig(lr=0.01))
    np.testing.assert_array_equal(param, start)
    np.testing.assert_array_equal(slot.v, np.zeros(3))


def test_adam_first_step_moves_by_lr():
    param, slot = adam_step(np.ones(1), np.full(1, 0.5), SlotState(), AdamConfig(lr=0.01))
    assert param[0] == pytest.approx(0.99, abs=1e-6)
    assert slot.m is not None and slot.v is not None


def test_adam_zero_gradient_leaves_parameter():
    param, _ = adam_step(np.full(3, 2.0), np.zeros(3), SlotState(), AdamConfig(lr=0.01))
    np.testing.assert_array_equal(param, np.full(3, 2.0))


def test_step_shape_mismatch():
    with pytest.raises(ContractViolation):
        rmsprop_step(np.zeros(2), np.zeros(3), SlotState(), RMSpropConfig(lr=0.1))


def test_clip_weights_bounds_and_idempotence():
    w = Tensor(np.array([-1.0, 0.01, 0.2]))
    clip_weights([w], 0.05)
    np.testing.assert_allclose(w.data, [-0.05, 0.01, 0.05])
    before = w.data.copy()
    clip_weights([w], 0.05)
    np.testing.assert_array_equal(w.data, before)


def test_clip_weights_rejects_non_positive_threshold():
    with pytest.raises(ConfigurationError):
        clip_weights([Tensor(np.zeros(2))], 0.0)


def test_optimizer_skips_parameters_without_gradient():
    a = Tensor(np.ones(2), requires_grad=True)
    b = Tensor(np.ones(2), requires_grad=True)
    optimizer = RMSprop({"a": a, "b": b}, RMSpropConfig(lr=0.1))
    (a * 3.0).sum().backward()
    optimizer.step()
    assert np.all(a.data < 1.0)
    np.testing.assert_array_equal(b.data, np.ones(2))
    assert list(optimizer.state_arrays()) == ["v/a", "n/a"]
    assert optimizer.state.step == 1


def test_learning_rate_update_and_state_reload():
    a = Tensor(np.ones(2), requires_grad=True)
    optimizer = Adam({"a": a}, AdamConfig(lr=0.1))
    (a * a).sum().backward()
    optimizer.step()
    optimizer.lr = optimizer.lr * 0.5
    assert optimizer.lr == pytest.approx(0.05)

    restored = Adam({"a": a}, AdamConfig(lr=0.1))
    restored.load_state(optimizer.state.step, optimizer.state_arrays(), lr=optimizer.lr)
    assert restored.lr == pytest.approx(0.05)
    np.testing.assert_array_equal(restored.state.slots["a"].m, optimizer.state.slots["a"].m)
    assert restored.state.slots["a"].step == 1


def test_critic_stays_clipped_through_updates():
    config = CriticConfig(kernel_sizes=[3], filters=4, fc_units=4)
    critic = ConvCritic(6, config, Rng(0))
    clip_weights(critic.parameters(), 0.05)
    optimizer = RMSprop(critic.parameters(), RMSpropConfig(lr=0.05))
    data = np.random.default_rng(0)
    for _ in range(20):
        scores = critic.score(data.random((3, 5, 6)).astype(np.float32))
        optimizer.zero_grad()
        (-scores.mean()).backward()
        optimizer.step()
        clip_weights(critic.parameters(), 0.05)
        assert critic.max_abs() <= 0.05 + 1e-7


def test_state_reload_keeps_per_parameter_step_counts():
    a = Tensor(np.ones(2), requires_grad=True)
    b = Tensor(np.ones(2), requires_grad=True)
    optimizer = Adam({"a": a, "b": b}, AdamConfig(lr=0.1))
    for use_b in (True, False, False):
        optimizer.zero_grad()
        loss = (a * a).sum() + (b * b).sum() if use_b else (a * a).sum()
        loss.backward()
        optimizer.step()

    arrays = {k: v.astype(np.float32) for k, v in optimizer.state_arrays().items()}
    restored = Adam({"a": a, "b": b}, AdamConfig(lr=0.1))
    restored.load_state(optimizer.state.step, arrays)
    assert restored.state.step == 3
    assert restored.state.slots["a"].step == 3
    assert restored.state.slots["b"].step == 1
