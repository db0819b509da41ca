"""Finite context-free grammars: counting, uniform sampling, recognition, corruption.

Grammars are written one production per line, alternatives separated by
``|`` and terminals quoted, e.g. ``NP: Det Nom | PropN``. Terminal labels
are decimal integers, which are also the symbols stored in dataset files.

Counting works bottom-up over a length axis: for every nonterminal ``A`` the
table holds the number of derivations of ``A`` yielding exactly ``n``
terminals. For an unambiguous grammar, such as the benchmark grammar, that
is the number of distinct strings. Sampling walks the same tables top-down,
weighting each choice by the exact number of completions, which yields the
uniform distribution over sentences.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from ..core.exceptions import ConfigurationError, UnsupportedGrammarError
from .rng import Rng

logger = logging.getLogger(__name__)

Alternative = Tuple[str, ...]

BENCHMARK_GRAMMAR = """
S: SOS NP VP EOS
SOS: '1'
EOS: '2'
NP: Det Nom | PropN
Nom: Adj N | N
VP: V NP | V NP PP
PP: P NP
PropN: '3' | '4' | '5'
Det: '6' | '7'
N: '8' | '9' | '10' | '11' | '12'
Adj: '13' | '14' | '15' | '16' | '17'
V: '18' | '19' | '20' | '21'
P: '22' | '23'
"""


@dataclass(frozen=True)
class Grammar:
    """
    Production rules keyed by nonterminal.

    Attributes:
        start: Start symbol
        rules: Nonterminal -> tuple of alternatives (tuples of symbols)
    """

    start: str
    rules: Dict[str, Tuple[Alternative, ...]] = field(hash=False)

    @property
    def nonterminals(self) -> Set[str]:
        return set(self.rules)

    @property
    def terminals(self) -> Set[str]:
        return {s for alts in self.rules.values() for alt in alts for s in alt if s not in self.rules}

    @property
    def terminal_labels(self) -> List[int]:
        return sorted(int(t) for t in self.terminals)

    def is_terminal(self, symbol: str) -> bool:
        return symbol not in self.rules


def parse_grammar(text: str, start: Optional[str] = None) -> Grammar:
    """
    Parse ``A: x y | 'z'`` lines into a :class:`Grammar`.

    Raises:
        ConfigurationError: On a malformed line or an undefined nonterminal
    """
    rules: Dict[str, List[Alternative]] = {}
    order: List[str] = []
    for raw in text.strip().splitlines():
        line = raw.strip()
        if not line:
            continue
        if ":" not in line:
            raise ConfigurationError("grammar line without ':' separator: {line}", params={"line": line})
        lhs, rhs = (part.strip() for part in line.split(":", 1))
        if lhs not in rules:
            rules[lhs] = []
            order.append(lhs)
        for alternative in rhs.split("|"):
            symbols = tuple(s.strip("'\"") if s.startswith(("'", '"')) else s for s in alternative.split())
            if not symbols:
                raise ConfigurationError("empty alternative for {lhs}", params={"lhs": lhs})
            rules[lhs].append(symbols)

    quoted = {s.strip("'\"") for raw in text.splitlines() for s in raw.split() if s.startswith(("'", '"'))}
    for lhs, alternatives in rules.items():
        for alternative in alternatives:
            for symbol in alternative:
                if symbol not in rules and symbol not in quoted:
                    raise ConfigurationError("undefined nonterminal {s} in rule {lhs}", params={"s": symbol, "lhs": lhs})
    return Grammar(start=start or order[0], rules={k: tuple(v) for k, v in rules.items()})


@lru_cache(maxsize=1)
def default_grammar() -> Grammar:
    """The benchmark grammar (terminal labels 1..23)."""
    return parse_grammar(BENCHMARK_GRAMMAR)


# =============================================================================
# Counting
# =============================================================================


def _check_finite(grammar: Grammar) -> List[str]:
    """Nonterminals ordered dependencies-first; raises on recursion."""
    order: List[str] = []
    state: Dict[str, int] = {}

    def visit(symbol: str, path: List[str]) -> None:
        mark = state.get(symbol, 0)
        if mark == 2:
            return
        if mark == 1:
            raise UnsupportedGrammarError(
                "grammar is recursive through {cycle}; its language is infinite",
                params={"cycle": " -> ".join(path + [symbol])},
            )
        state[symbol] = 1
        for alternative in grammar.rules[symbol]:
            for child in alternative:
                if child in grammar.rules:
                    visit(child, path + [symbol])
        state[symbol] = 2
        order.append(symbol)

    for symbol in grammar.rules:
        visit(symbol, [])
    return order


@dataclass
class LanguageCounts:
    """
    Derivation counts per symbol and exact length.

    Attributes:
        max_len: Counted lengths are ``1 .. max_len - 1``
        by_length: Symbol -> list where entry ``n`` counts yields of length ``n``
    """

    grammar: Grammar
    max_len: int
    by_length: Dict[str, List[int]]

    def count(self, symbol: str) -> int:
        return sum(self.by_length[symbol])

    @property
    def total(self) -> int:
        return self.count(self.grammar.start)

    def table(self) -> Dict[str, int]:
        return {symbol: self.count(symbol) for symbol in self.grammar.rules}

    def sequence_counts(self, symbols: Sequence[str]) -> List[int]:
        """Counts by length for a concatenation of symbols."""
        out = [0] * self.max_len
        out[0] = 1
        for symbol in symbols:
            out = _convolve(out, self._symbol_counts(symbol), self.max_len)
        return out

    def _symbol_counts(self, symbol: str) -> List[int]:
        if symbol in self.by_length:
            return self.by_length[symbol]
        unit = [0] * self.max_len
        if self.max_len > 1:
            unit[1] = 1
        return unit


def _convolve(left: List[int], right: List[int], limit: int) -> List[int]:
    out = [0] * limit
    for i, a in enumerate(left):
        if not a:
            continue
        for j, b in enumerate(right):
            if b and i + j < limit:
                out[i + j] += a * b
    return out


def count_cfg_sentences(grammar: Grammar, max_len: int = 20) -> LanguageCounts:
    """
    Count sentences of every nonterminal with fewer than ``max_len`` terminals.

    Raises:
        UnsupportedGrammarError: If the grammar is recursive (infinite language)

    Examples:
        >>> counts = count_cfg_sentences(default_grammar())
        >>> counts.count("NP"), counts.total
        (63, 2016252)
    """
    order = _check_finite(grammar)
    counts = LanguageCounts(grammar=grammar, max_len=max_len, by_length={})
    for symbol in order:
        total = [0] * max_len
        for alternative in grammar.rules[symbol]:
            total = [a + b for a, b in zip(total, counts.sequence_counts(alternative))]
        counts.by_length[symbol] = total
    logger.debug(f"Grammar counts: {counts.table()}")
    return counts


def enumerate_language(grammar: Grammar, symbol: Optional[str] = None) -> Iterator[Tuple[str, ...]]:
    """
    Brute-force enumeration of every derivation's yield (finite grammars only).

    Used as an independent oracle for counting and recognition.
    """
    _check_finite(grammar)
    symbol = symbol or grammar.start
    if grammar.is_terminal(symbol):
        yield (symbol,)
        return
    for alternative in grammar.rules[symbol]:
        parts = [list(enumerate_language(grammar, child)) for child in alternative]
        for combo in itertools.product(*parts):
            yield tuple(itertools.chain.from_iterable(combo))


# =============================================================================
# Sampling
# =============================================================================


def sample_cfg_sentence(rng: Rng, grammar: Grammar, counts: Optional[LanguageCounts] = None) -> List[int]:
    """
    Draw one sentence uniformly from the counted language.

    The length is drawn first in proportion to the number of sentences of
    that length, then every alternative and every split of the length
    among the symbols of an alternative is drawn in proportion to its
    number of completions.
    """
    counts = counts or count_cfg_sentences(grammar)
    start = grammar.start
    length = rng.weighted_index(counts.by_length[start])
    return [int(t) for t in _expand(rng, counts, start, length)]


def _expand(rng: Rng, counts: LanguageCounts, symbol: str, length: int) -> List[str]:
    grammar = counts.grammar
    if grammar.is_terminal(symbol):
        return [symbol]
    alternatives = grammar.rules[symbol]
    weights = [counts.sequence_counts(alt)[length] for alt in alternatives]
    alternative = alternatives[rng.weighted_index(weights)]
    return _expand_sequence(rng, counts, alternative, length)


def _expand_sequence(rng: Rng, counts: LanguageCounts, symbols: Sequence[str], length: int) -> List[str]:
    out: List[str] = []
    remaining = length
    for i, symbol in enumerate(symbols):
        head = counts._symbol_counts(symbol)
        tail = counts.sequence_counts(symbols[i + 1 :])
        weights = [head[n] * tail[remaining - n] if n <= remaining else 0 for n in range(counts.max_len)]
        n = rng.weighted_index(weights)
        out.extend(_expand(rng, counts, symbol, n))
        remaining -= n
    return out


# =============================================================================
# Recognition
# =============================================================================


def cfg_accepts(tokens: Sequence[int], grammar: Grammar) -> bool:
    """
    Chart (Earley) recognizer: True iff ``tokens`` is a sentence of the start symbol.

    Unknown tokens and the empty sequence are rejected.

    Examples:
        >>> cfg_accepts([1, 3, 18, 3, 2], default_grammar())
        True
        >>> cfg_accepts([1, 3, 18, 2], default_grammar())
        False
    """
    words = [str(int(t)) for t in tokens]
    if not words or any(w not in grammar.terminals for w in words):
        return False
    n = len(words)
    chart: List[Set[Tuple[str, Alternative, int, int]]] = [set() for _ in range(n + 1)]
    for alternative in grammar.rules[grammar.start]:
        chart[0].add((grammar.start, alternative, 0, 0))

    for i in range(n + 1):
        agenda = list(chart[i])
        while agenda:
            lhs, rhs, dot, origin = agenda.pop()
            if dot < len(rhs):
                symbol = rhs[dot]
                if symbol in grammar.rules:
                    for alternative in grammar.rules[symbol]:
                        item = (symbol, alternative, 0, i)
                        if item not in chart[i]:
                            chart[i].add(item)
                            agenda.append(item)
                elif i < n and words[i] == symbol:
                    chart[i + 1].add((lhs, rhs, dot + 1, origin))
            else:
                for parent_lhs, parent_rhs, parent_dot, parent_origin in list(chart[origin]):
                    if parent_dot < len(parent_rhs) and parent_rhs[parent_dot] == lhs:
                        item = (parent_lhs, parent_rhs, parent_dot + 1, parent_origin)
                        if item not in chart[i]:
                            chart[i].add(item)
                            agenda.append(item)

    return any(
        lhs == grammar.start and dot == len(rhs) and origin == 0 for lhs, rhs, dot, origin in chart[n]
    )


# =============================================================================
# Corruption
# =============================================================================


def inject_cfg_errors(
    seq: Sequence[int],
    rng: Rng,
    terminals: Sequence[int],
    mean: float = 5.0,
    sd: float = 2.0,
) -> List[int]:
    """
    Apply ``round(N(mean, sd))`` (zero-thresholded) uniformly typed edits.

    Each edit is a deletion of a random token (skipped on a length-1
    sequence), an insertion of a uniformly drawn terminal at a random
    position, or a swap of two distinct random positions.
    """
    out = list(seq)
    count = max(int(round(rng.normal(mean, sd))), 0)
    for _ in range(count):
        kind = int(rng.integers(0, 3))
        if kind == 0:
            if len(out) > 1:
                del out[int(rng.integers(0, len(out)))]
        elif kind == 1:
            token = int(terminals[int(rng.integers(0, len(terminals)))])
            out.insert(int(rng.integers(0, len(out) + 1)), token)
        elif len(out) > 1:
            i, j = (int(v) for v in rng.choice(len(out), size=2, replace=False))
            out[i], out[j] = out[j], out[i]
    return out
