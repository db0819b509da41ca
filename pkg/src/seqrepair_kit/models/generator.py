"""Attention encoder-decoder generator.

A stack of LSTM layers encodes the (possibly broken) input; an equally deep
decoder stack, initialised with the encoder's final state, emits one
probability row per step. Each row combines the decoder's top hidden state
with a global dot-product attention context through one linear projection.

Two decoding modes exist:

* :meth:`Seq2SeqGenerator.generate` feeds ``argmax(s_t)`` back as the next
  input and returns the soft rows ``s_t`` themselves, which is what the critic
  scores during adversarial training;
* :meth:`Seq2SeqGenerator.teacher_forced_rows` feeds the ground-truth
  previous token, used by every likelihood loss.

All methods work on batches: token arrays are ``(B, T)`` with a boolean
mask marking real positions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from ..core import functional as F
from ..core.exceptions import ContractViolation
from ..core.models import GeneratorConfig
from ..core.tensor import Tensor, concat, stack, where
from ..data.rng import Rng
from ..settings import EOS_ID, MASK_NEG, SOS_ID
from .base_model import ParameterStore, xavier_uniform

logger = logging.getLogger(__name__)


@dataclass
class RnnState:
    """Per-layer hidden and cell tensors, each ``(B, d)``."""

    h: List[Tensor]
    c: List[Tensor]

    @property
    def layers(self) -> int:
        return len(self.h)


@dataclass
class SoftBatch:
    """
    Generator output rows.

    Attributes:
        rows: ``(B, T', V)`` probability rows; rows at or beyond ``lengths[b]`` are padding
        lengths: Number of emitted rows per sequence, including the EOS row when one was produced
        ended: Whether each sequence emitted EOS before the step limit
    """

    rows: Tensor
    lengths: np.ndarray
    ended: np.ndarray

    @property
    def mask(self) -> np.ndarray:
        return np.arange(self.rows.shape[1])[None, :] < self.lengths[:, None]

    def hard(self) -> np.ndarray:
        """Argmax token ids ``(B, T')``."""
        return np.argmax(self.rows.data, axis=-1)

    def hard_sequences(self) -> List[List[int]]:
        """Argmax ids per sequence, cut at the emitted length."""
        ids = self.hard()
        return [ids[b, : self.lengths[b]].tolist() for b in range(len(self.lengths))]


def lstm_cell(x: Tensor, h: Tensor, c: Tensor, weight: Tensor, bias: Tensor) -> Tuple[Tensor, Tensor]:
    """
    One LSTM step.

    Gates are laid out ``[input, forget, output, candidate]`` along the
    ``4d`` columns of ``weight``, which maps ``[x, h]`` to pre-activations.

    Raises:
        ContractViolation: If input and state widths do not match ``weight``
    """
    width = h.shape[-1]
    if weight.shape != (x.shape[-1] + width, 4 * width) or c.shape != h.shape:
        raise ContractViolation(
            "lstm_cell dimensions x={x} h={h} c={c} W={w} are inconsistent",
            params={"x": x.shape, "h": h.shape, "c": c.shape, "w": weight.shape},
        )
    z = concat([x, h], axis=-1) @ weight + bias
    i = F.sigmoid(z[..., :width])
    f = F.sigmoid(z[..., width : 2 * width])
    o = F.sigmoid(z[..., 2 * width : 3 * width])
    g = F.tanh(z[..., 3 * width :])
    c_new = f * c + i * g
    h_new = o * F.tanh(c_new)
    return h_new, c_new


class Seq2SeqGenerator(ParameterStore):
    """
    Multi-layer LSTM encoder-decoder with global dot-product attention.

    Args:
        vocab_size (int): V
        config (GeneratorConfig): Layer count and hidden width
        rng (Optional[Rng]): Initialisation stream; None leaves every parameter at zero

    Examples:
        >>> gen = Seq2SeqGenerator(10, GeneratorConfig(layers=1, hidden=8), Rng(0))
        >>> out = gen.generate(np.array([[3, 4, 2]]), np.ones((1, 3), bool), max_len=5)
        >>> out.rows.shape[0]
        1
    """

    def __init__(self, vocab_size: int, config: GeneratorConfig, rng: Optional[Rng] = None) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.layers = config.layers
        self.hidden = config.hidden
        d = self.hidden

        def init(shape, fan_in, fan_out):
            return np.zeros(shape, np.float32) if rng is None else xavier_uniform(rng, shape, fan_in, fan_out)

        self.register("embedding", init((vocab_size, d), vocab_size, d))
        for side in ("encoder", "decoder"):
            for layer in range(self.layers):
                self.register(f"{side}.{layer}.W", init((2 * d, 4 * d), 2 * d, 4 * d))
                bias = np.zeros(4 * d, np.float32)
                if rng is not None:
                    bias[d : 2 * d] = 1.0
                self.register(f"{side}.{layer}.b", bias)
        self.register("output.W", init((2 * d, vocab_size), 2 * d, vocab_size))
        self.register("output.b", np.zeros(vocab_size, np.float32))

    # ------------------------------------------------------------------ #
    # Building blocks
    # ------------------------------------------------------------------ #
    def zero_state(self, batch: int) -> RnnState:
        dtype = self["embedding"].dtype
        zeros = [Tensor(np.zeros((batch, self.hidden), dtype)) for _ in range(self.layers)]
        return RnnState(h=list(zeros), c=list(zeros))

    def _stack_step(self, side: str, x: Tensor, state: RnnState, mask: Optional[np.ndarray] = None) -> RnnState:
        h_out, c_out = [], []
        for layer in range(self.layers):
            h, c = lstm_cell(x, state.h[layer], state.c[layer], self[f"{side}.{layer}.W"], self[f"{side}.{layer}.b"])
            if mask is not None:
                # padded positions keep the previous state
                h = where(mask, h, state.h[layer])
                c = where(mask, c, state.c[layer])
            h_out.append(h)
            c_out.append(c)
            x = h
        return RnnState(h=h_out, c=c_out)

    def encode(self, tokens: np.ndarray, mask: Optional[np.ndarray] = None) -> Tuple[Tensor, RnnState]:
        """
        Run the encoder stack.

        Args:
            tokens: ``(B, T)`` ids
            mask: ``(B, T)`` real-position mask; defaults to all positions

        Returns:
            Tuple[Tensor, RnnState]: top-layer states ``(B, T, d)`` and the final
            state used to initialise the decoder

        Raises:
            ContractViolation: If the input has no positions
        """
        tokens = np.atleast_2d(np.asarray(tokens, dtype=np.int64))
        if tokens.shape[1] == 0:
            raise ContractViolation("cannot encode an empty sequence")
        mask = np.ones(tokens.shape, bool) if mask is None else np.asarray(mask, bool)
        embedded = F.embedding(self["embedding"], tokens)
        state = self.zero_state(tokens.shape[0])
        outputs = []
        for t in range(tokens.shape[1]):
            state = self._stack_step("encoder", embedded[:, t, :], state, mask[:, t : t + 1])
            outputs.append(state.h[-1])
        return stack(outputs, axis=1), state

    @staticmethod
    def attend(query: Tensor, enc_states: Tensor, enc_mask: Optional[np.ndarray] = None) -> Tensor:
        """
        Global dot-product attention.

        ``scores_t = query . h_t``, ``weights = softmax(scores)`` over real
        positions, ``context = sum_t weights_t h_t``. Accepts a single query
        ``(d,)`` with states ``(T, d)`` or batches ``(B, d)`` / ``(B, T, d)``.

        Raises:
            ContractViolation: If there are no encoder states or widths differ
        """
        single = query.ndim == 1
        if single:
            query = query.reshape(1, -1)
            enc_states = enc_states.reshape(1, *enc_states.shape)
        batch, steps, width = enc_states.shape
        if steps == 0:
            raise ContractViolation("attention needs at least one encoder state")
        if query.shape[-1] != width:
            raise ContractViolation(
                "query width {q} differs from state width {s}", params={"q": query.shape[-1], "s": width}
            )
        scores = (enc_states * query.reshape(batch, 1, width)).sum(axis=-1)
        if enc_mask is not None:
            penalty = np.where(np.asarray(enc_mask, bool).reshape(batch, steps), 0.0, MASK_NEG)
            scores = scores + penalty.astype(scores.dtype)
        weights = F.softmax(scores, axis=-1)
        context = (enc_states * weights.reshape(batch, steps, 1)).sum(axis=1)
        return context.reshape(width) if single else context

    def decode_step(
        self,
        prev_tokens: np.ndarray,
        state: RnnState,
        enc_states: Tensor,
        enc_mask: Optional[np.ndarray] = None,
    ) -> Tuple[Tensor, RnnState]:
        """
        One decoder step: ``s_t = softmax(W [context; h_top] + b)``.

        Raises:
            TokenIndexError: If a previous token is outside the vocabulary
        """
        prev_tokens = np.asarray(prev_tokens, dtype=np.int64).reshape(-1)
        x = F.embedding(self["embedding"], prev_tokens)
        state = self._stack_step("decoder", x, state)
        top = state.h[-1]
        context = self.attend(top, enc_states, enc_mask)
        logits = concat([context, top], axis=-1) @ self["output.W"] + self["output.b"]
        return F.softmax(logits, axis=-1), state

    # ------------------------------------------------------------------ #
    # Decoding modes
    # ------------------------------------------------------------------ #
    def generate(
        self, tokens: np.ndarray, mask: Optional[np.ndarray], max_len: Union[int, np.ndarray]
    ) -> SoftBatch:
        """
        Free-running decoding with argmax feedback.

        Starts from SOS; at each step emits ``s_t`` and feeds ``argmax(s_t)``
        back. A sequence stops after the row whose argmax is EOS, or at its
        row limit. ``max_len`` is one limit for the batch or a ``(B,)`` array
        of per-sequence limits.

        Raises:
            ContractViolation: If a limit is below 1 or the limits do not match the batch
        """
        tokens = np.atleast_2d(np.asarray(tokens, dtype=np.int64))
        batch = tokens.shape[0]
        limits = np.asarray(max_len, dtype=np.int64)
        if limits.ndim > 1 or (limits.ndim == 1 and limits.shape[0] != batch):
            raise ContractViolation(
                "expected one row limit or {b} limits, got shape {shape}", params={"b": batch, "shape": limits.shape}
            )
        limits = np.broadcast_to(limits, (batch,))
        if limits.min() < 1:
            raise ContractViolation("max_len must be at least 1, got {n}", params={"n": int(limits.min())})
        mask = np.ones(tokens.shape, bool) if mask is None else np.asarray(mask, bool)
        enc_states, state = self.encode(tokens, mask)
        prev = np.full(batch, SOS_ID, dtype=np.int64)
        ended = np.zeros(batch, bool)
        lengths = np.zeros(batch, np.int64)
        rows = []
        for t in range(int(limits.max())):
            probs, state = self.decode_step(prev, state, enc_states, mask)
            rows.append(probs)
            live = ~ended & (t < limits)
            lengths[live] += 1
            prev = np.argmax(probs.data, axis=-1)
            ended |= live & (prev == EOS_ID)
            if not np.any(~ended & (t + 1 < limits)):
                break
        return SoftBatch(rows=stack(rows, axis=1), lengths=lengths, ended=ended)

    def teacher_forced_rows(
        self,
        src: np.ndarray,
        src_mask: Optional[np.ndarray],
        tgt: np.ndarray,
    ) -> Tensor:
        """
        Decode with the ground-truth previous token as input.

        Decoder inputs are ``SOS, tgt_1 .. tgt_{T'-1}``; one row per target position.

        Returns:
            Tensor: ``(B, T', V)`` probability rows

        Raises:
            ContractViolation: If the target is empty
        """
        tgt = np.atleast_2d(np.asarray(tgt, dtype=np.int64))
        if tgt.shape[1] == 0:
            raise ContractViolation("teacher forcing needs a non-empty target")
        src = np.atleast_2d(np.asarray(src, dtype=np.int64))
        enc_states, state = self.encode(src, src_mask)
        inputs = np.concatenate([np.full((tgt.shape[0], 1), SOS_ID, np.int64), tgt[:, :-1]], axis=1)
        rows = []
        for t in range(tgt.shape[1]):
            probs, state = self.decode_step(inputs[:, t], state, enc_states, src_mask)
            rows.append(probs)
        return stack(rows, axis=1)
