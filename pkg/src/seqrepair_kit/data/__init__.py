from .rng import Rng
from .vocab import Vocab
from .sorting import draw_error_count, gen_sorted_sequence, inject_sort_errors, sort_oracle
from .grammar import (
    Grammar,
    LanguageCounts,
    cfg_accepts,
    count_cfg_sentences,
    default_grammar,
    enumerate_language,
    inject_cfg_errors,
    parse_grammar,
    sample_cfg_sentence,
)
from .noise import noise_sequence
from .batching import SequenceBatch, batch_indices, clip_to_length, make_batch, num_batches
from .io import read_metadata, read_pairs, read_sequences, write_metadata, write_sequences
