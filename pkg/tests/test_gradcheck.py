import numpy as np
import pytest

from seqrepair_kit.core import functional as F
from seqrepair_kit.core.exceptions import ContractViolation, GradientCheckError
from seqrepair_kit.core.gradcheck import grad_check
from seqrepair_kit.core.models import GeneratorConfig
from seqrepair_kit.core.tensor import Tensor
from seqrepair_kit.data.rng import Rng
from seqrepair_kit.models.critic import conv1d, critic_input
from seqrepair_kit.models.generator import Seq2SeqGenerator, lstm_cell
from seqrepair_kit.objectives.losses import auto_loss, freq_loss, nll_seq2seq_loss

TOLERANCE = 1e-4


@pytest.fixture
def gen():
    return np.random.default_rng(42)


def test_softmax_cross_entropy(gen):
    def op(z):
        return F.cross_entropy(F.softmax(z), np.array([2, 0])).sum()

    assert grad_check(op, [gen.normal(size=(2, 4))]) < TOLERANCE


def test_elementwise_chain(gen):
    def op(a, b):
        return ((a * b).tanh() + (a / (b * b + 1.0)).sigmoid() + (a * a + 1.0).log()).sum()

    assert grad_check(op, [gen.normal(size=(3, 2)), gen.normal(size=(3, 2))]) < TOLERANCE


def test_matmul_and_broadcast(gen):
    def op(x, w, b):
        return ((x @ w + b) ** 2).mean()

    assert grad_check(op, [gen.normal(size=(2, 3, 4)), gen.normal(size=(4, 5)), gen.normal(size=5)]) < TOLERANCE


def test_lstm_cell(gen):
    def op(x, h, c, w, b):
        h_new, c_new = lstm_cell(x, h, c, w, b)
        return (h_new * h_new).sum() + c_new.sum()

    point = [
        gen.normal(size=(2, 3)),
        gen.normal(size=(2, 4)),
        gen.normal(size=(2, 4)),
        gen.normal(scale=0.5, size=(7, 16)),
        gen.normal(size=16),
    ]
    assert grad_check(op, point) < TOLERANCE


def test_attention(gen):
    mask = np.array([[True, True, False], [True, True, True]])
    weights = gen.normal(size=(2, 4))

    def op(query, states):
        return (Seq2SeqGenerator.attend(query, states, mask) * weights).sum()

    assert grad_check(op, [gen.normal(size=(2, 4)), gen.normal(size=(2, 3, 4))]) < TOLERANCE


def test_unfold_and_conv1d(gen):
    def op(seq, weight, bias):
        return (conv1d(seq, weight, bias, 3) ** 2).sum()

    assert grad_check(op, [gen.normal(size=(2, 5, 3)), gen.normal(size=(9, 2)), gen.normal(size=2)]) < TOLERANCE


def test_critic_head_with_max_pool(gen):
    def op(seq, weight, fc):
        features = F.relu(conv1d(seq, weight, None, 3))
        return (features.max(axis=1) @ fc).sum()

    point = [gen.normal(size=(2, 6, 3)), gen.normal(size=(9, 4)), gen.normal(size=(4, 1))]
    assert grad_check(op, point) < TOLERANCE


def test_critic_framing(gen):
    lengths = np.array([2, 1])
    weights = gen.normal(size=(2, 5, 6))

    def op(rows):
        return (critic_input(rows, lengths, 5, 6) * weights).sum()

    assert grad_check(op, [gen.random(size=(2, 3, 6))]) < TOLERANCE


def test_freq_regularizer(gen):
    x = np.array([[3, 4, 5, 2], [5, 5, 2, 0]])
    lengths = np.array([3, 2])
    ended = np.array([True, False])

    def op(z):
        return freq_loss(x, F.softmax(z, axis=-1), lengths, ended)

    assert grad_check(op, [gen.normal(size=(2, 3, 6))]) < TOLERANCE


def test_masked_reconstruction_loss(gen):
    x = np.array([[3, 4, 2], [5, 2, 0]])
    mask = x != 0

    def op(z):
        return auto_loss(F.softmax(z, axis=-1), x, mask)

    assert grad_check(op, [gen.normal(size=(2, 3, 6))]) < TOLERANCE


def test_teacher_forced_loss_end_to_end():
    generator = Seq2SeqGenerator(5, GeneratorConfig(layers=1, hidden=4), Rng(3))
    names = list(generator.to_dict())
    src = np.array([[3, 4, 2]])
    tgt = np.array([[4, 3, 2]])

    def op(*params):
        generator._params.update(zip(names, params))
        return nll_seq2seq_loss(generator.teacher_forced_rows(src, None, tgt), tgt)

    point = [array.astype(np.float64) for array in generator.to_dict().values()]
    assert grad_check(op, point) < TOLERANCE


def _lstm_total(h, c):
    return (h * h).sum() + c.sum()


PRIMITIVES = {
    "tanh": (lambda a: (a.tanh() * a).sum(), [(3,)]),
    "sigmoid": (lambda a: (a.sigmoid() * a).sum(), [(3,)]),
    "log": (lambda a: ((a * a + 0.5).log()).sum(), [(3,)]),
    "softmax": (lambda z: (F.softmax(z, axis=-1) ** 2).sum(), [(2, 3)]),
    "matmul": (lambda x, w: ((x @ w) ** 2).sum(), [(2, 3), (3, 2)]),
    "lstm_cell": (lambda x, h, c, w, b: _lstm_total(*lstm_cell(x, h, c, w, b)), [(1, 2), (1, 2), (1, 2), (4, 8), (8,)]),
    "attend": (lambda q, s: Seq2SeqGenerator.attend(q, s).sum(), [(1, 2), (1, 3, 2)]),
    "conv1d": (lambda s, w, b: (conv1d(s, w, b, 3) ** 2).sum(), [(1, 4, 2), (6, 2), (2,)]),
}


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(PRIMITIVES))
def test_primitive_gradients_at_random_points(name):
    op, shapes = PRIMITIVES[name]
    rng = np.random.default_rng(2024)
    for _ in range(100):
        assert grad_check(op, [rng.normal(size=shape) for shape in shapes]) < TOLERANCE


def test_non_scalar_output_is_rejected():
    with pytest.raises(ContractViolation):
        grad_check(lambda a: a * 2.0, [np.ones(3)])


def test_non_finite_output_is_reported():
    def op(a):
        return a.log().sum()

    with pytest.raises(GradientCheckError):
        grad_check(op, [np.array([-1.0])])


def test_float64_graph_is_not_downcast():
    a = Tensor(np.ones(2, dtype=np.float64), requires_grad=True)
    assert (a * 2.0).dtype == np.float64
