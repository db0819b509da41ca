import json

import numpy as np
import pytest

from seqrepair_kit.core.exceptions import ContractViolation, DataError, TokenIndexError
from seqrepair_kit.data.batching import batch_indices, clip_to_length, make_batch, num_batches
from seqrepair_kit.data.io import read_metadata, read_pairs, read_sequences, write_metadata, write_sequences
from seqrepair_kit.data.rng import Rng
from seqrepair_kit.data.vocab import Vocab


def test_vocab_layout():
    vocab = Vocab.for_sorting(50)
    assert vocab.size == 54
    assert vocab.encode([0, 1]) == [3, 4]
    assert vocab.decode([3, 4, 2, 5]) == [0, 1]
    assert vocab.decode([0, 1, 3]) == [0]
    with pytest.raises(TokenIndexError):
        vocab.encode([51])


def test_make_batch(sort_vocab):
    batch = make_batch([[0, 1], [2]], sort_vocab)
    np.testing.assert_array_equal(batch.ids, [[3, 4, 2], [5, 2, 0]])
    np.testing.assert_array_equal(batch.mask, [[True, True, True], [True, True, False]])
    assert batch.lengths.tolist() == [3, 2]
    assert len(batch) == 2 and batch.width == 3
    assert batch.one_hot(sort_vocab.size).shape == (2, 3, sort_vocab.size)


def test_make_batch_clips_bodies(sort_vocab):
    batch = make_batch([[0, 1, 2], [4]], sort_vocab, max_len=1)
    np.testing.assert_array_equal(batch.ids, [[3, 2], [7, 2]])


def test_make_batch_needs_rows(sort_vocab):
    with pytest.raises(ContractViolation):
        make_batch([], sort_vocab)


def test_clip_to_length_keeps_the_prefix():
    seq = [5, 4, 3, 2]
    assert clip_to_length(seq, 2) == [5, 4]
    assert clip_to_length(seq, 10) == seq
    assert clip_to_length(seq, None) == seq


def test_batch_indices_cover_every_item_once(rng):
    chunks = list(batch_indices(10, 4, rng))
    assert [len(c) for c in chunks] == [4, 4, 2]
    assert sorted(np.concatenate(chunks).tolist()) == list(range(10))
    assert num_batches(10, 4) == 3


def test_stream_state_continues_the_same_draws():
    stream = Rng(1234).child("batches")
    stream.permutation(10)
    saved = json.loads(json.dumps(stream.get_state()))
    expected = [stream.permutation(10).tolist(), stream.split().integers(0, 100, size=3).tolist()]

    restored = Rng(1234).child("batches")
    restored.load_state(saved)
    assert [restored.permutation(10).tolist(), restored.split().integers(0, 100, size=3).tolist()] == expected


def test_stream_state_must_match_the_stream():
    saved = Rng(1234).child("batches").get_state()
    with pytest.raises(ContractViolation):
        Rng(1234).child("probe").load_state(saved)
    with pytest.raises(ContractViolation):
        Rng(99).child("batches").load_state(saved)


def test_sequence_files(tmp_path):
    path = write_sequences(tmp_path / "data" / "good.txt", [[1, 2, 3], [4]])
    assert path.read_text() == "1 2 3\n4\n"
    assert read_sequences(path) == [[1, 2, 3], [4]]


def test_missing_file_names_the_path(tmp_path):
    with pytest.raises(DataError) as err:
        read_sequences(tmp_path / "absent.txt")
    assert "absent.txt" in str(err.value)


def test_non_integer_token(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 2\n3 x\n")
    with pytest.raises(DataError, match="line 2"):
        read_sequences(path)


def test_empty_dataset(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("")
    with pytest.raises(DataError):
        read_sequences(path)


def test_paired_files_must_align(tmp_path):
    bad = write_sequences(tmp_path / "bad.txt", [[2, 1], [3]])
    good = write_sequences(tmp_path / "good.txt", [[1, 2]])
    with pytest.raises(DataError):
        read_pairs(bad, good)


def test_metadata(tmp_path):
    path = write_metadata(tmp_path / "metadata.json", {"task": "sort", "seed": 3})
    assert read_metadata(path) == {"task": "sort", "seed": 3}
    with pytest.raises(DataError):
        read_metadata(tmp_path / "none.json")
