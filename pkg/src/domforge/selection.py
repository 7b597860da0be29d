"""Sample-selection strategies for assembling pretraining subsets.

Four strategies: keep everything, keep the fraction most similar to a
downstream task (negative Euclidean distance between term distributions),
keep the most lexically diverse fraction (type-token ratio plus Shannon
entropy in bits), or keep the top fraction of a composite of both after
min-max scaling. All rankings break ties by paragraph id ascending so
results are deterministic.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .corpus import Corpus, Paragraph, export_jsonl
from .errors import DataError, UsageError
from .vocab import term_frequencies_texts, tokenize_words, top_n_tokens

DEFAULT_KEEP_FRACTION = 0.7
DEFAULT_REFERENCE_VOCAB_SIZE = 10_000


class StrategyKind(str, Enum):
    FULL = "full"
    SIM = "sim"
    DIV = "div"
    DIV_PLUS_SIM = "div_sim"


@dataclass(frozen=True)
class SelectionStrategy:
    kind: StrategyKind
    keep_fraction: float = DEFAULT_KEEP_FRACTION

    def __post_init__(self) -> None:
        if not isinstance(self.kind, StrategyKind):
            object.__setattr__(self, "kind", StrategyKind(self.kind))
        if not (0.0 < self.keep_fraction <= 1.0):
            raise UsageError(f"keep_fraction must be in (0, 1], got {self.keep_fraction}")

    @property
    def needs_task(self) -> bool:
        return self.kind in (StrategyKind.SIM, StrategyKind.DIV_PLUS_SIM)


@dataclass(frozen=True, eq=False)
class TaskReference:
    """Mean term distribution of a downstream task over its top vocabulary."""

    centroid: np.ndarray
    reference_vocab: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.centroid) != len(self.reference_vocab):
            raise DataError("centroid dimension does not match reference vocabulary")
        if np.any(self.centroid < 0) or abs(float(self.centroid.sum()) - 1.0) > 1e-9:
            raise DataError("centroid must be a probability vector (sum 1 within 1e-9)")


def _distribution(tokens: Iterable[str], index: dict[str, int], dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=np.float64)
    hits = 0
    for tok in tokens:
        pos = index.get(tok)
        if pos is not None:
            vec[pos] += 1.0
            hits += 1
    if hits == 0:
        # all-OOV paragraphs fall back to the uniform distribution
        vec.fill(1.0 / dim)
        return vec
    vec /= hits
    return vec


def paragraph_distribution(
    p: Paragraph | str, reference_vocab: Sequence[str]
) -> np.ndarray:
    """L1-normalized term-frequency vector of a paragraph over a reference vocabulary."""
    if not reference_vocab:
        raise DataError("reference vocabulary is empty")
    text = p.text if isinstance(p, Paragraph) else p
    index = {tok: i for i, tok in enumerate(reference_vocab)}
    return _distribution(tokenize_words(text), index, len(reference_vocab))


def build_task_reference(
    texts: Iterable[str], vocab_size: int = DEFAULT_REFERENCE_VOCAB_SIZE
) -> TaskReference:
    """Reference vocabulary (top tokens of the task) and centroid distribution."""
    texts = list(texts)
    if not texts:
        raise DataError("no task examples")
    table = term_frequencies_texts(texts)
    vocab = tuple(top_n_tokens(table, vocab_size))
    if not vocab:
        raise DataError("task examples produced an empty vocabulary")
    index = {tok: i for i, tok in enumerate(vocab)}
    acc = np.zeros(len(vocab), dtype=np.float64)
    for text in texts:
        acc += _distribution(tokenize_words(text), index, len(vocab))
    centroid = acc / len(texts)
    return TaskReference(centroid, vocab)


def similarity_score(p_dist: np.ndarray, task: TaskReference) -> float:
    """Negative Euclidean distance to the task centroid; 0 is the maximum.

    The squared-difference reduction uses exactly-rounded summation so equal
    distributions always score identically, independent of term order.
    """
    p_dist = np.asarray(p_dist, dtype=np.float64)
    if p_dist.shape != task.centroid.shape:
        raise DataError(
            f"dimension mismatch: {p_dist.shape} vs {task.centroid.shape}"
        )
    diff = p_dist - task.centroid
    return -math.sqrt(math.fsum((diff * diff).tolist()))


def diversity_score(p: Paragraph | str) -> float:
    """Type-token ratio plus Shannon entropy (bits) of the token distribution."""
    text = p.text if isinstance(p, Paragraph) else p
    tokens = tokenize_words(text)
    n = len(tokens)
    if n == 0:
        raise DataError("empty paragraph")
    counts = Counter(tokens)
    ttr = len(counts) / n
    # exactly-rounded sum keeps the score independent of token order
    entropy = -math.fsum(
        (c / n) * math.log2(c / n) for c in counts.values()
    )
    return ttr + entropy


def minmax_scale(scores: Sequence[float]) -> list[float]:
    """Affine map onto [0, 1]; a constant input maps every entry to 0.5."""
    if len(scores) == 0:
        raise DataError("minmax_scale requires at least one score")
    if any(not math.isfinite(s) for s in scores):
        raise DataError("minmax_scale requires finite scores")
    lo, hi = min(scores), max(scores)
    if lo == hi:
        return [0.5] * len(scores)
    span = hi - lo
    return [(s - lo) / span for s in scores]


def kept_count_for(n: int, strategy: SelectionStrategy) -> int:
    """Number of paragraphs kept: all for FULL, else max(1, floor(keep_fraction * n))."""
    if strategy.kind is StrategyKind.FULL:
        return n
    # Fraction(str(...)) gives the decimal the caller wrote, immune to float fuzz
    return max(1, math.floor(Fraction(str(strategy.keep_fraction)) * n))


def kept_ids(ids: Sequence[str], scores: Sequence[float], count: int) -> set[str]:
    """Ids of the ``count`` highest-scoring entries, ties broken by id ascending."""
    if len(ids) != len(scores):
        raise DataError("ids and scores must have equal length")
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return {ids[i] for i in order[:count]}


@dataclass(frozen=True)
class ScoreRecord:
    id: str
    kept: bool
    similarity: float | None = None
    diversity: float | None = None
    composite: float | None = None

    def to_json_obj(self) -> dict:
        obj: dict = {"id": self.id}
        if self.similarity is not None:
            obj["similarity"] = self.similarity
        if self.diversity is not None:
            obj["diversity"] = self.diversity
        if self.composite is not None:
            obj["composite"] = self.composite
        obj["kept"] = self.kept
        return obj


@dataclass(frozen=True)
class SelectionResult:
    """Per-paragraph scores and verdicts, in corpus order."""

    records: tuple[ScoreRecord, ...]
    strategy: SelectionStrategy
    kept_count: int

    @property
    def total(self) -> int:
        return len(self.records)

    def kept_id_set(self) -> set[str]:
        return {r.id for r in self.records if r.kept}


def _similarities(corpus: Corpus, task: TaskReference) -> list[float]:
    index = {tok: i for i, tok in enumerate(task.reference_vocab)}
    dim = len(task.reference_vocab)
    return [
        similarity_score(_distribution(tokenize_words(p.text), index, dim), task)
        for p in corpus
    ]


def select(
    corpus: Corpus, strategy: SelectionStrategy, task: TaskReference | None = None
) -> SelectionResult:
    """Apply a selection strategy; deterministic for identical inputs."""
    n = len(corpus)
    if n == 0:
        raise DataError("no paragraphs")
    if strategy.needs_task and task is None:
        raise UsageError(f"strategy {strategy.kind.value!r} requires a task reference")

    ids = corpus.ids()
    count = kept_count_for(n, strategy)

    if strategy.kind is StrategyKind.FULL:
        records = tuple(ScoreRecord(pid, kept=True) for pid in ids)
        return SelectionResult(records, strategy, count)

    sims = _similarities(corpus, task) if strategy.needs_task else None
    divs = (
        [diversity_score(p) for p in corpus]
        if strategy.kind in (StrategyKind.DIV, StrategyKind.DIV_PLUS_SIM)
        else None
    )

    if strategy.kind is StrategyKind.SIM:
        ranking = sims
    elif strategy.kind is StrategyKind.DIV:
        ranking = divs
    else:
        ranking = [a + b for a, b in zip(minmax_scale(sims), minmax_scale(divs))]

    kept = kept_ids(ids, ranking, count)
    records = []
    for i, pid in enumerate(ids):
        records.append(
            ScoreRecord(
                pid,
                kept=pid in kept,
                similarity=sims[i] if sims is not None else None,
                diversity=divs[i] if divs is not None else None,
                composite=ranking[i] if strategy.kind is StrategyKind.DIV_PLUS_SIM else None,
            )
        )
    return SelectionResult(tuple(records), strategy, count)


def filtered_corpus(corpus: Corpus, result: SelectionResult) -> Corpus:
    kept = result.kept_id_set()
    paragraphs = tuple(p for p in corpus if p.id in kept)
    provenance = dict(corpus.provenance)
    provenance["selection_strategy"] = result.strategy.kind.value
    return Corpus(paragraphs, provenance)


def write_scores_jsonl(result: SelectionResult, out: IO | str | Path) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_scores_jsonl(result, fh)
        return
    for record in result.records:
        out.write(json.dumps(record.to_json_obj(), ensure_ascii=False) + "\n")


def selection_summary(result: SelectionResult) -> dict:
    return {
        "strategy": result.strategy.kind.value,
        "keep_fraction": result.strategy.keep_fraction,
        "kept_count": result.kept_count,
        "total": result.total,
    }


def export_selection(
    corpus: Corpus, result: SelectionResult, out_dir: str | Path
) -> dict:
    """Write scores JSONL, filtered corpus JSONL and a summary JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_scores_jsonl(result, out_dir / "selection_scores.jsonl")
    export_jsonl(filtered_corpus(corpus, result), out_dir / "selected.jsonl")
    summary = selection_summary(result)
    with open(out_dir / "selection_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
