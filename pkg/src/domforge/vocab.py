"""Word-level tokenization, frequency tables, vocabulary overlap and augmentation.

The tokenizer is deliberately simple and tokenizer-framework independent:
lowercase, with runs of letters/digits kept together and runs of punctuation
split off as standalone tokens. It feeds both the selection metrics and the
frequency ranking behind vocabulary augmentation.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from .corpus import Corpus
from .errors import DataError, UsageError

# word runs (letters/digits/marks), punctuation+symbol runs, underscore runs
_TOKEN_RE = re.compile(r"[^\W_]+|[^\w\s]+|_+")


def tokenize_words(text: str) -> list[str]:
    """Lowercased word-level tokens with punctuation runs as standalone tokens."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class FrequencyTable:
    """token -> count mapping over a corpus slice; no zero-count entries."""

    counts: dict[str, int]
    total_tokens: int

    def __post_init__(self) -> None:
        if any(c <= 0 for c in self.counts.values()):
            raise DataError("frequency table must not store zero or negative counts")
        if sum(self.counts.values()) != self.total_tokens:
            raise DataError("total_tokens does not match the sum of counts")

    @classmethod
    def from_counter(cls, counter: Counter[str]) -> "FrequencyTable":
        counts = {t: c for t, c in counter.items() if c > 0}
        return cls(counts, sum(counts.values()))

    def merge(self, other: "FrequencyTable") -> "FrequencyTable":
        merged = Counter(self.counts)
        merged.update(other.counts)
        return FrequencyTable.from_counter(merged)


def term_frequencies(corpus: Corpus) -> FrequencyTable:
    """Token counts over ``tokenize_words`` of every paragraph."""
    return term_frequencies_texts(corpus.texts())


def term_frequencies_texts(texts: Iterable[str]) -> FrequencyTable:
    counter: Counter[str] = Counter()
    for text in texts:
        counter.update(tokenize_words(text))
    return FrequencyTable.from_counter(counter)


@dataclass(frozen=True)
class VocabSet:
    tokens: frozenset[str]
    label: str = ""

    def __len__(self) -> int:
        return len(self.tokens)


def read_vocab_file(path: str | Path, label: str | None = None) -> VocabSet:
    """Read a plain token-per-line vocabulary file (exact-match semantics)."""
    tokens = set()
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            token = raw.rstrip("\n")
            if token:
                tokens.add(token)
    return VocabSet(frozenset(tokens), label or Path(path).name)


def ranked_tokens(table: FrequencyTable) -> list[str]:
    """All tokens ordered by (frequency desc, token lexicographic asc)."""
    return sorted(table.counts, key=lambda t: (-table.counts[t], t))


def top_n_tokens(table: FrequencyTable, n: int) -> list[str]:
    """The n highest-count tokens in rank order; fewer if the table is smaller."""
    if n <= 0:
        raise UsageError(f"n must be >= 1, got {n}")
    return ranked_tokens(table)[:n]


def top_n_vocabulary(table: FrequencyTable, n: int, label: str = "") -> VocabSet:
    return VocabSet(frozenset(top_n_tokens(table, n)), label)


def vocabulary_overlap(a: VocabSet, b: VocabSet, mode: str = "jaccard") -> float:
    """Overlap percentage between two vocabularies.

    ``jaccard`` (default): |a n b| / |a u b| * 100, symmetric.
    ``directional``: |a n b| / |b| * 100.
    """
    if not a.tokens or not b.tokens:
        raise DataError("empty vocabulary")
    inter = len(a.tokens & b.tokens)
    if mode == "jaccard":
        return 100.0 * inter / len(a.tokens | b.tokens)
    if mode == "directional":
        return 100.0 * inter / len(b.tokens)
    raise UsageError(f"unknown overlap mode: {mode!r}")


@dataclass(frozen=True)
class AugmentedVocab:
    """A base vocabulary plus an ordered list of newly added tokens."""

    base: VocabSet
    added: tuple[str, ...]
    final_size: int = field(init=False)

    def __post_init__(self) -> None:
        if len(set(self.added)) != len(self.added):
            raise DataError("added token list contains duplicates")
        if set(self.added) & self.base.tokens:
            raise DataError("added tokens overlap the base vocabulary")
        object.__setattr__(self, "final_size", len(self.base) + len(self.added))


def augment_vocabulary(base: VocabSet, table: FrequencyTable, k: int) -> AugmentedVocab:
    """Add the top-k most frequent tokens that are not already in ``base``.

    Fewer than k tokens are added only when the candidate pool is exhausted.
    """
    if k < 0:
        raise UsageError(f"k must be >= 0, got {k}")
    added: list[str] = []
    for token in ranked_tokens(table):
        if len(added) == k:
            break
        if token not in base.tokens:
            added.append(token)
    return AugmentedVocab(base, tuple(added))


def augmented_to_json(av: AugmentedVocab) -> dict:
    return {
        "base_size": len(av.base),
        "added": list(av.added),
        "final_size": av.final_size,
    }


def write_added_tokens(av: AugmentedVocab, out: IO | str | Path) -> None:
    """Plain-text added-tokens file, one token per line in rank order."""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_added_tokens(av, fh)
        return
    for token in av.added:
        out.write(token + "\n")


def write_augmented_json(av: AugmentedVocab, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(augmented_to_json(av), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
