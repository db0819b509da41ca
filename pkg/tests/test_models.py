import numpy as np
import pytest
from pydantic import ValidationError

from seqrepair_kit.core.exceptions import ContractViolation, TokenIndexError
from seqrepair_kit.core.models import CriticConfig, GeneratorConfig
from seqrepair_kit.core.tensor import Tensor
from seqrepair_kit.data.rng import Rng
from seqrepair_kit.data.vocab import Vocab
from seqrepair_kit.models.critic import ConvCritic, critic_input, one_hot
from seqrepair_kit.models.generator import Seq2SeqGenerator, lstm_cell
from seqrepair_kit.models.inference import repair
from seqrepair_kit.settings import EOS_ID, PAD_ID, SOS_ID

V = 8


@pytest.fixture
def generator():
    return Seq2SeqGenerator(V, GeneratorConfig(layers=2, hidden=6), Rng(0))


@pytest.fixture
def small_critic():
    return ConvCritic(V, CriticConfig(kernel_sizes=[3, 5], filters=3, fc_units=4), Rng(0))


# ---------------------------------------------------------------------- #
# Generator
# ---------------------------------------------------------------------- #
def test_generate_shapes_and_distributions(generator):
    tokens = np.array([[3, 4, 5, 2], [3, 2, 0, 0]])
    out = generator.generate(tokens, tokens != PAD_ID, max_len=5)
    batch, steps, vocab = out.rows.shape
    assert (batch, vocab) == (2, V)
    assert 1 <= steps <= 5
    assert np.all(out.lengths <= 5)
    np.testing.assert_allclose(out.rows.data.sum(axis=-1), np.ones((2, steps)), rtol=1e-5)


def test_zero_generator_emits_uniform_rows_until_the_limit():
    gen = Seq2SeqGenerator(V, GeneratorConfig(layers=1, hidden=4))
    out = gen.generate(np.array([[3, 4, 2]]), None, max_len=4)
    np.testing.assert_allclose(out.rows.data, np.full((1, 4, V), 1.0 / V), rtol=1e-6)
    assert out.lengths.tolist() == [4]
    assert not out.ended[0]


def test_generation_stops_after_eos():
    gen = Seq2SeqGenerator(V, GeneratorConfig(layers=1, hidden=4))
    gen["output.b"].data[EOS_ID] = 10.0
    out = gen.generate(np.array([[3, 4, 2]]), None, max_len=6)
    assert out.rows.shape[1] == 1
    assert out.lengths.tolist() == [1]
    assert out.ended[0]
    assert out.hard_sequences() == [[EOS_ID]]


def test_generate_needs_a_positive_limit(generator):
    with pytest.raises(ContractViolation):
        generator.generate(np.array([[3, 2]]), None, max_len=0)


def test_per_sequence_limits():
    gen = Seq2SeqGenerator(V, GeneratorConfig(layers=1, hidden=4))
    tokens = np.array([[3, 4, 2], [3, 2, 0]])
    out = gen.generate(tokens, tokens != PAD_ID, max_len=np.array([2, 4]))
    assert out.rows.shape[1] == 4
    assert out.lengths.tolist() == [2, 4]
    assert not out.ended.any()


def test_short_limit_truncates_only_its_own_row(generator):
    tokens = np.array([[3, 4, 5, 2], [5, 3, 2, 0]])
    mask = tokens != PAD_ID
    full = generator.generate(tokens, mask, max_len=6)
    mixed = generator.generate(tokens, mask, max_len=np.array([2, 6]))
    assert np.all(mixed.lengths <= [2, 6])
    for b, (cut, whole) in enumerate(zip(mixed.hard_sequences(), full.hard_sequences())):
        assert cut == whole[: len(cut)]
        n = mixed.lengths[b]
        np.testing.assert_allclose(mixed.rows.data[b, :n], full.rows.data[b, :n], rtol=1e-6, atol=1e-7)
    assert mixed.lengths[1] == full.lengths[1]


def test_generate_rejects_misshaped_limits(generator):
    tokens = np.array([[3, 2], [4, 2]])
    with pytest.raises(ContractViolation):
        generator.generate(tokens, None, max_len=np.array([2, 3, 4]))
    with pytest.raises(ContractViolation):
        generator.generate(tokens, None, max_len=np.array([[2, 3]]))
    with pytest.raises(ContractViolation):
        generator.generate(tokens, None, max_len=np.array([2, 0]))


def test_longer_limit_extends_the_same_prefix(generator):
    tokens = np.array([[3, 4, 5, 2], [5, 3, 2, 0]])
    mask = tokens != PAD_ID
    short = generator.generate(tokens, mask, max_len=3)
    long = generator.generate(tokens, mask, max_len=8)
    steps = short.rows.shape[1]
    np.testing.assert_allclose(short.rows.data, long.rows.data[:, :steps], rtol=1e-6, atol=1e-7)
    for cut, whole in zip(short.hard_sequences(), long.hard_sequences()):
        assert cut == whole[: len(cut)]


def test_rows_do_not_depend_on_other_sequences(generator):
    tokens = np.array([[3, 4, 5, 2], [5, 3, 2, 0]])
    pair = generator.generate(tokens, tokens != PAD_ID, max_len=5)
    alone = generator.generate(tokens[:1], None, max_len=5)
    n = alone.lengths[0]
    assert pair.lengths[0] == n
    np.testing.assert_allclose(pair.rows.data[0, :n], alone.rows.data[0, :n], rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("batch_size", [1, 2])
def test_repair_applies_each_source_limit(batch_size):
    vocab = Vocab.for_sorting(4)
    gen = Seq2SeqGenerator(vocab.size, GeneratorConfig(layers=1, hidden=4))
    gen["output.b"].data[3] = 10.0
    repaired = repair(gen, vocab, [[1, 2], [0, 1, 2, 3]], np.array([2, 5]), batch_size)
    assert repaired == [[0, 0], [0, 0, 0, 0, 0]]


def test_padding_does_not_change_the_encoding(generator):
    _, padded = generator.encode(np.array([[3, 4, 2, 0, 0]]), np.array([[True, True, True, False, False]]))
    _, plain = generator.encode(np.array([[3, 4, 2]]))
    for layer in range(2):
        np.testing.assert_allclose(padded.h[layer].data, plain.h[layer].data, rtol=1e-6)
        np.testing.assert_allclose(padded.c[layer].data, plain.c[layer].data, rtol=1e-6)


def test_encode_rejects_empty_and_unknown_tokens(generator):
    with pytest.raises(ContractViolation):
        generator.encode(np.zeros((1, 0), dtype=np.int64))
    with pytest.raises(TokenIndexError):
        generator.encode(np.array([[3, V]]))


def test_teacher_forced_rows(generator):
    src = np.array([[3, 4, 2]])
    rows = generator.teacher_forced_rows(src, None, np.array([[4, 3, 2]]))
    assert rows.shape == (1, 3, V)
    with pytest.raises(ContractViolation):
        generator.teacher_forced_rows(src, None, np.zeros((1, 0), dtype=np.int64))


def test_attention_respects_mask():
    states = Tensor(np.array([[1.0, 0.0], [0.0, 1.0], [5.0, 5.0]]))
    context = Seq2SeqGenerator.attend(Tensor([1.0, 1.0]), states, np.array([True, False, False]))
    np.testing.assert_allclose(context.data, [1.0, 0.0], atol=1e-6)


def test_attention_weights_worked_example():
    states = Tensor(np.array([[1.0, 0.0], [0.0, 1.0]]))
    context = Seq2SeqGenerator.attend(Tensor([2.0, 0.0]), states)
    np.testing.assert_allclose(context.data, [0.8808, 0.1192], atol=1e-4)


def test_attention_needs_states():
    with pytest.raises(ContractViolation):
        Seq2SeqGenerator.attend(Tensor(np.ones((1, 2))), Tensor(np.ones((1, 0, 2))))


def test_lstm_cell_dimension_check():
    with pytest.raises(ContractViolation):
        lstm_cell(Tensor(np.ones((1, 3))), Tensor(np.ones((1, 4))), Tensor(np.ones((1, 4))),
                  Tensor(np.ones((6, 16))), Tensor(np.ones(16)))


def test_lstm_cell_worked_example():
    d = 1
    bias = np.zeros(4 * d)
    bias[d : 2 * d] = 1.0
    h, c = lstm_cell(
        Tensor(np.zeros((1, 1))), Tensor(np.zeros((1, d))), Tensor(np.ones((1, d))),
        Tensor(np.zeros((1 + d, 4 * d))), Tensor(bias),
    )
    assert c.data[0, 0] == pytest.approx(0.7311, abs=1e-4)
    assert h.data[0, 0] == pytest.approx(0.3119, abs=1e-4)


def test_forget_gate_bias_starts_at_one(generator):
    bias = generator["encoder.0.b"].data
    np.testing.assert_array_equal(bias[6:12], np.ones(6))
    assert not bias[:6].any()


def test_same_seed_same_parameters():
    a = Seq2SeqGenerator(V, GeneratorConfig(layers=1, hidden=4), Rng(3)).to_dict()
    b = Seq2SeqGenerator(V, GeneratorConfig(layers=1, hidden=4), Rng(3)).to_dict()
    assert a.keys() == b.keys()
    for name in a:
        np.testing.assert_array_equal(a[name], b[name])


# ---------------------------------------------------------------------- #
# Critic
# ---------------------------------------------------------------------- #
def test_critic_input_framing():
    rows = np.full((1, 2, V), 1.0 / V, dtype=np.float32)
    framed = critic_input(rows, np.array([1]), 4, V).data[0]
    np.testing.assert_array_equal(framed[0], one_hot(SOS_ID, V))
    np.testing.assert_allclose(framed[1], rows[0, 0])
    np.testing.assert_array_equal(framed[2], one_hot(PAD_ID, V))
    np.testing.assert_array_equal(framed[3], one_hot(PAD_ID, V))


def test_critic_input_cuts_long_rows():
    rows = np.tile(one_hot(3, V), (1, 6, 1))
    assert critic_input(rows, np.array([6]), 4, V).shape == (1, 4, V)


def test_critic_scores_batches_and_single_matrices(small_critic):
    batch = np.random.default_rng(0).random((3, 6, V)).astype(np.float32)
    scores = small_critic.score(batch)
    assert scores.shape == (3,)
    single = small_critic.score(batch[1])
    assert single.shape == ()
    assert single.item() == pytest.approx(float(scores.data[1]), rel=1e-5)


def test_critic_shape_checks():
    critic = ConvCritic(V, CriticConfig(kernel_sizes=[3], filters=2, fc_units=2), Rng(0), width=5)
    with pytest.raises(ContractViolation):
        critic.score(np.zeros((1, 6, V), np.float32))
    with pytest.raises(ContractViolation):
        critic.score(np.zeros((1, 5, V + 1), np.float32))


def test_zero_critic_is_constant():
    critic = ConvCritic(V, CriticConfig(kernel_sizes=[3], filters=2, fc_units=2))
    critic["fc2.b"].data[:] = 0.3
    scores = critic.score(np.random.default_rng(1).random((4, 5, V)).astype(np.float32))
    np.testing.assert_allclose(scores.data, np.full(4, 0.3), rtol=1e-6)


def test_deep_critic_layers():
    config = CriticConfig(depth=3, kernel_sizes=[3, 5], filters=3, deep_channels=4, fc_units=4)
    critic = ConvCritic(V, config, Rng(0))
    names = critic.parameters()
    assert "conv2.W" in names and "conv3.W" in names
    assert critic["conv2.W"].shape == (3 * 6, 4)
    assert critic["fc1.W"].shape == (4, 4)
    assert critic.score(np.zeros((2, 7, V), np.float32)).shape == (2,)


def test_only_the_deep_critic_rectifies_conv_features(small_critic):
    x = Tensor(np.random.default_rng(2).random((3, 7, V)).astype(np.float32))
    assert (small_critic.features(x).data < 0).any()
    config = CriticConfig(depth=3, kernel_sizes=[3, 5], filters=3, deep_channels=4, fc_units=4)
    assert (ConvCritic(V, config, Rng(0)).features(x).data >= 0).all()


def test_first_layer_filter_layout(small_critic):
    filters = small_critic.first_layer_filters(5)
    assert filters.shape == (3, 5, V)
    weight = small_critic["conv1.k5.W"].data
    assert filters[1, 2, 4] == weight[2 * V + 4, 1]


def test_invalid_depth_is_rejected():
    with pytest.raises(ValidationError):
        CriticConfig(depth=2)
