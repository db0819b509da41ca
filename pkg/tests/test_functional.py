import math

import numpy as np
import pytest

from seqrepair_kit.core import functional as F
from seqrepair_kit.core.exceptions import ContractViolation, TokenIndexError
from seqrepair_kit.core.tensor import Tensor
from seqrepair_kit.models.critic import conv1d


def test_softmax_rows_sum_to_one(np_rng):
    probs = F.softmax(Tensor(np_rng.normal(size=(4, 7))), axis=-1)
    np.testing.assert_allclose(probs.data.sum(axis=-1), np.ones(4), rtol=1e-6)
    assert np.all(probs.data >= 0)


def test_softmax_is_shift_invariant(np_rng):
    logits = np_rng.normal(size=6)
    np.testing.assert_allclose(F.softmax(Tensor(logits)).data, F.softmax(Tensor(logits + 100.0)).data, atol=1e-12)


def test_softmax_large_logits_stay_finite():
    probs = F.softmax(Tensor([1e4, 0.0, -1e4]))
    assert np.all(np.isfinite(probs.data))
    np.testing.assert_allclose(probs.data, [1.0, 0.0, 0.0], atol=1e-6)


def test_softmax_empty_axis():
    with pytest.raises(ContractViolation):
        F.softmax(Tensor(np.zeros(0)))


def test_cross_entropy_values():
    assert F.cross_entropy([0.5, 0.5], 1).item() == pytest.approx(math.log(2), rel=1e-6)
    # floored: a zero probability gives -log(1e-12) instead of infinity
    assert F.cross_entropy([1.0, 0.0], 1).item() == pytest.approx(-math.log(1e-12), rel=1e-5)


def test_cross_entropy_target_out_of_range():
    with pytest.raises(TokenIndexError) as err:
        F.cross_entropy([0.5, 0.5], 2)
    assert isinstance(err.value, IndexError)


def test_embedding_rejects_unknown_ids():
    table = Tensor(np.zeros((4, 2)))
    with pytest.raises(TokenIndexError):
        F.embedding(table, np.array([0, 4]))


def test_unfold1d_windows():
    x = Tensor(np.array([1.0, 2.0, 3.0]).reshape(1, 3, 1))
    windows = F.unfold1d(x, 3).data[0]
    np.testing.assert_allclose(windows, [[0, 1, 2], [1, 2, 3], [2, 3, 0]])


def test_conv1d_same_padding_example():
    out = conv1d([[1.0], [2.0], [3.0]], Tensor(np.ones((3, 1))), None, 3)
    np.testing.assert_allclose(out.data.ravel(), [3.0, 6.0, 5.0])


def test_conv1d_filter_mismatch():
    with pytest.raises(ContractViolation):
        conv1d(np.ones((1, 4, 2)), Tensor(np.ones((5, 1))), None, 3)
