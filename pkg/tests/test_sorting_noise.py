from collections import Counter

import pytest

from seqrepair_kit.core.exceptions import ConfigurationError, ContractViolation
from seqrepair_kit.data.noise import noise_sequence
from seqrepair_kit.data.rng import Rng
from seqrepair_kit.data.sorting import gen_sorted_sequence, inject_sort_errors, sort_oracle


# ---------------------------------------------------------------------- #
# Sorting benchmark
# ---------------------------------------------------------------------- #
def test_full_domain_is_the_identity(rng):
    assert gen_sorted_sequence(rng, 3, 2) == [0, 1, 2]


def test_sorted_sequences_are_strictly_increasing(rng):
    for _ in range(200):
        seq = gen_sorted_sequence(rng, 20, 50)
        assert len(seq) == 20
        assert all(a < b for a, b in zip(seq, seq[1:]))
        assert 0 <= seq[0] and seq[-1] <= 50


def test_domain_too_small(rng):
    with pytest.raises(ConfigurationError):
        gen_sorted_sequence(rng, 5, 3)


def test_sort_oracle_repairs_every_corruption(rng):
    for _ in range(10000):
        y = gen_sorted_sequence(rng, 20, 50)
        x = inject_sort_errors(y, rng)
        assert Counter(x) == Counter(y)
        assert sort_oracle(x) == y


def test_zero_errors_is_the_identity(rng):
    assert inject_sort_errors([1, 2, 3], rng, mean=0, sd=0) == [1, 2, 3]


def test_single_swap_of_a_pair(rng):
    assert inject_sort_errors([1, 2], rng, mean=1, sd=0) == [2, 1]


def test_same_seed_same_pairs():
    def draw(seed):
        stream = Rng(seed)
        return [inject_sort_errors(gen_sorted_sequence(stream, 10, 30), stream) for _ in range(20)]

    assert draw(5) == draw(5)
    assert draw(5) != draw(6)


@pytest.mark.slow
def test_values_are_uniformly_included(rng):
    draws = 100_000
    hits = Counter()
    for _ in range(draws):
        hits.update(gen_sorted_sequence(rng, 20, 50))
    for value in range(51):
        assert hits[value] / draws == pytest.approx(20 / 51, abs=0.01)


# ---------------------------------------------------------------------- #
# Denoising noise
# ---------------------------------------------------------------------- #
def test_no_noise_is_the_identity(rng):
    y = [3, 1, 4, 1, 5]
    assert noise_sequence(y, rng, p_drop=0.0, rate=0.0) == y


def test_noise_never_empties_a_sequence(rng):
    for _ in range(500):
        out = noise_sequence([7, 8], rng, p_drop=0.99, rate=0.5)
        assert len(out) >= 1
        assert set(out) <= {7, 8}


def test_matching_insertions_and_deletions_keep_the_length(rng):
    y = list(range(20))
    out = noise_sequence(y, rng, p_drop=0.0, rate=0.1)
    assert len(out) == 20
    assert set(out) <= set(y)


def test_drop_rate(rng):
    y = list(range(100_000))
    out = noise_sequence(y, rng, p_drop=0.2, rate=0.0)
    assert len(out) / len(y) == pytest.approx(0.8, abs=0.01)


def test_empty_sequence_is_rejected(rng):
    with pytest.raises(ContractViolation):
        noise_sequence([], rng)
