import math

import numpy as np
import pandas as pd
import pytest

from seqrepair_kit.core.exceptions import ContractViolation
from seqrepair_kit.core.models import CriticConfig, GeneratorConfig
from seqrepair_kit.data.grammar import default_grammar
from seqrepair_kit.data.rng import Rng
from seqrepair_kit.data.vocab import Vocab
from seqrepair_kit.metrics.accuracy import cfg_validity_rate, order_accuracy, sequence_accuracy
from seqrepair_kit.metrics.bleu import bleu4, brevity_penalty
from seqrepair_kit.metrics.diagnostics import (
    critic_accuracy,
    export_filter_weights,
    hoyer_sparsity,
    loss_ratio_diagnostic,
    loss_ratio_from_scores,
    mean_filter_sparsity,
)
from seqrepair_kit.metrics.report import EvalReport, write_table
from seqrepair_kit.models.critic import ConvCritic
from seqrepair_kit.models.generator import Seq2SeqGenerator


# ---------------------------------------------------------------------- #
# Accuracy
# ---------------------------------------------------------------------- #
def test_sequence_accuracy():
    assert sequence_accuracy([[1, 2, 3], [3, 1, 2]], [[1, 2, 3], [1, 2, 3]]) == 0.5
    assert sequence_accuracy([[1, 2]], [[1, 2, 3]]) == 0.0


def test_order_accuracy():
    assert order_accuracy([[1, 2, 3], [3, 2], [1, 1], []]) == 0.5


def test_accuracy_needs_predictions():
    with pytest.raises(ContractViolation):
        sequence_accuracy([], [])
    with pytest.raises(ContractViolation):
        order_accuracy([])
    with pytest.raises(ContractViolation):
        sequence_accuracy([[1]], [[1], [2]])


def test_cfg_validity_rate():
    preds = [[1, 3, 18, 3, 2], [1, 3, 18, 2], [], [1, 4, 19, 5, 2]]
    assert cfg_validity_rate(preds, default_grammar()) == 0.5


# ---------------------------------------------------------------------- #
# BLEU
# ---------------------------------------------------------------------- #
def _reference_bleu(candidates, references):
    """Direct transcription of corpus BLEU with explicit loops."""
    log_sum = 0.0
    for n in range(1, 5):
        matched = total = 0
        for cand, ref in zip(candidates, references):
            cand_grams = [tuple(cand[i : i + n]) for i in range(len(cand) - n + 1)]
            ref_grams = [tuple(ref[i : i + n]) for i in range(len(ref) - n + 1)]
            for gram in set(cand_grams):
                matched += min(cand_grams.count(gram), ref_grams.count(gram))
            total += len(cand_grams)
        if matched == 0:
            return 0.0
        log_sum += math.log(matched / total) / 4
    c = sum(len(x) for x in candidates)
    r = sum(len(x) for x in references)
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * math.exp(log_sum)


def test_bleu_identity():
    corpus = [[1, 2, 3, 4, 5], [6, 7, 8, 9]]
    assert bleu4(corpus, corpus) == pytest.approx(1.0)


def test_bleu_brevity_example():
    assert bleu4([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e"]]) == pytest.approx(math.exp(-0.25), abs=1e-4)


def test_bleu_short_candidates_score_zero():
    assert bleu4([[1, 2, 3]], [[1, 2, 3]]) == 0.0
    assert bleu4([[]], [[1, 2, 3, 4]]) == 0.0


def test_bleu_matches_reference_implementation():
    data = np.random.default_rng(9)
    for _ in range(100):
        size = int(data.integers(1, 6))
        references = [data.integers(0, 4, size=int(data.integers(4, 12))).tolist() for _ in range(size)]
        candidates = [data.integers(0, 4, size=int(data.integers(4, 12))).tolist() for _ in range(size)]
        assert bleu4(candidates, references) == pytest.approx(_reference_bleu(candidates, references), abs=1e-9)


def test_brevity_penalty():
    assert brevity_penalty(0, 5) == 0.0
    assert brevity_penalty(6, 5) == 1.0
    assert brevity_penalty(5, 5) == 1.0


def test_bleu_needs_aligned_corpora():
    with pytest.raises(ContractViolation):
        bleu4([], [])
    with pytest.raises(ContractViolation):
        bleu4([[1]], [])


# ---------------------------------------------------------------------- #
# Critic diagnostics
# ---------------------------------------------------------------------- #
def test_hoyer_sparsity():
    assert hoyer_sparsity([1, 0, 0, 0]) == pytest.approx(1.0)
    assert hoyer_sparsity([1, 1, 1, 1]) == pytest.approx(0.0)
    assert hoyer_sparsity([1, 1, 0, 0]) == pytest.approx(0.5858, abs=1e-4)
    assert hoyer_sparsity([0, 0, 0]) == 0.0
    assert hoyer_sparsity([-2.0]) == 1.0
    with pytest.raises(ContractViolation):
        hoyer_sparsity([])


def test_critic_accuracy():
    assert critic_accuracy([1.0, 0.2, 0.5], [0.5, 0.3, 0.5]) == pytest.approx(1 / 3)
    with pytest.raises(ContractViolation):
        critic_accuracy([1.0], [])


def test_loss_ratio_from_scores():
    result = loss_ratio_from_scores(np.array([3.0, 5.0]), np.array([1.0, 1.0]), np.array([True, False]))
    assert result.value_correct == 2.0
    assert result.value_incorrect == 4.0
    assert result.ratio == 2.0
    assert result.as_row()["ratio_defined"]


def test_loss_ratio_undefined_without_incorrect_pairs():
    result = loss_ratio_from_scores(np.array([3.0]), np.array([1.0]), np.array([True]))
    assert result.ratio is None
    assert result.n_incorrect == 0
    assert not result.ratio_defined


def test_constant_critic_has_no_ratio():
    vocab_size = 13
    critic = ConvCritic(vocab_size, CriticConfig(kernel_sizes=[3], filters=2, fc_units=2))
    critic["fc2.b"].data[:] = 0.7
    generator = Seq2SeqGenerator(vocab_size, GeneratorConfig(layers=1, hidden=4), Rng(0))

    sources = [[1, 0, 2], [3, 4, 5], [0, 2, 1]]
    targets = [[0, 1, 2], [3, 4, 5], [0, 1, 2]]
    result = loss_ratio_diagnostic(critic, generator, Vocab.for_sorting(9), sources, targets, width=5)
    assert result.n_correct + result.n_incorrect == 3
    assert result.ratio is None
    for value in (result.value_correct, result.value_incorrect):
        assert value is None or value == pytest.approx(0.0, abs=1e-6)


def test_filter_weight_export():
    critic = ConvCritic(6, CriticConfig(kernel_sizes=[3, 5], filters=3, fc_units=2), Rng(2))
    frame = export_filter_weights(critic, kernel_size=11)
    assert list(frame.columns) == ["filter", "position", "channel", "normalized_weight", "sparsity"]
    assert len(frame) == 3 * 5 * 6
    peaks = frame.groupby("filter")["normalized_weight"].apply(lambda s: s.abs().max())
    np.testing.assert_allclose(peaks.to_numpy(), np.ones(3))
    assert frame["sparsity"].between(0.0, 1.0).all()
    assert 0.0 <= mean_filter_sparsity(critic, 3) <= 1.0


def test_sparse_filter_scores_one():
    critic = ConvCritic(4, CriticConfig(kernel_sizes=[3], filters=1, fc_units=1))
    critic["conv1.k3.W"].data[1 * 4 + 2, 0] = 0.05
    frame = export_filter_weights(critic, kernel_size=3)
    assert frame["sparsity"].iloc[0] == pytest.approx(1.0)


# ---------------------------------------------------------------------- #
# Reports
# ---------------------------------------------------------------------- #
def test_eval_report_round_trip(tmp_path):
    report = EvalReport(task="sort", count=10)
    report.add("sequence_accuracy", 0.3)
    assert report.missing() == ["order_accuracy"]
    report.add("order_accuracy", 0.9)
    path = report.write_csv(tmp_path / "eval_report.csv")
    loaded = EvalReport.read_csv(path, "sort")
    assert loaded.count == 10
    assert loaded.values == pytest.approx({"sequence_accuracy": 0.3, "order_accuracy": 0.9})


def test_eval_report_rejects_out_of_range_values():
    with pytest.raises(ContractViolation):
        EvalReport(task="cfg", count=1).add("bleu4", 1.5)


def test_write_table_header_lines(tmp_path):
    path = write_table(pd.DataFrame({"epoch": [0, 1], "ratio": [0.5, None]}), tmp_path / "t.csv", {"depth": 3})
    text = path.read_text()
    assert text.startswith("# depth=3\n")
    frame = pd.read_csv(path, comment="#")
    assert frame["epoch"].tolist() == [0, 1]
    assert np.isnan(frame["ratio"].iloc[1])
