"""Plain-Python brute-force oracles used by the unit and acceptance tests.

Everything here is computed with straightforward loops and exactly-rounded
summation, independent of the library's vectorized implementations. Only the
tokenizer is shared, since it defines the token contract both sides consume.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

from domforge.vocab import tokenize_words


def oracle_distribution(text: str, index: dict[str, int], dim: int) -> list[float]:
    vec = [0.0] * dim
    hits = 0
    for tok in tokenize_words(text):
        i = index.get(tok)
        if i is not None:
            vec[i] += 1.0
            hits += 1
    if hits == 0:
        return [1.0 / dim] * dim
    return [v / hits for v in vec]


def oracle_reference(task_texts: list[str], vocab_size: int):
    counts: Counter[str] = Counter()
    for t in task_texts:
        counts.update(tokenize_words(t))
    vocab = sorted(counts, key=lambda tok: (-counts[tok], tok))[:vocab_size]
    index = {tok: i for i, tok in enumerate(vocab)}
    dim = len(vocab)
    acc = [0.0] * dim
    for t in task_texts:
        vec = oracle_distribution(t, index, dim)
        for i in range(dim):
            acc[i] += vec[i]
    centroid = [a / len(task_texts) for a in acc]
    return index, dim, centroid


def oracle_similarity(text: str, index, dim, centroid) -> float:
    vec = oracle_distribution(text, index, dim)
    return -math.sqrt(math.fsum((v - c) * (v - c) for v, c in zip(vec, centroid)))


def oracle_diversity(text: str) -> float:
    toks = tokenize_words(text)
    n = len(toks)
    counts = Counter(toks)
    ttr = len(counts) / n
    entropy = -math.fsum((c / n) * math.log2(c / n) for c in counts.values())
    return ttr + entropy


def oracle_minmax(xs: list[float]) -> list[float]:
    lo, hi = min(xs), max(xs)
    if lo == hi:
        return [0.5] * len(xs)
    return [(x - lo) / (hi - lo) for x in xs]


def oracle_kept_count(n: int, keep_fraction: float) -> int:
    return max(1, math.floor(Fraction(str(keep_fraction)) * n))


def oracle_kept(ids: list[str], scores: list[float], kept_count: int) -> set[str]:
    ranked = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return {ids[i] for i in ranked[:kept_count]}


def oracle_select(
    corpus,
    kind: str,
    keep_fraction: float,
    task_texts: list[str] | None = None,
    vocab_size: int = 10_000,
) -> tuple[set[str], int]:
    """Full-sort selection over plain-python scores; returns (kept ids, kept_count)."""
    ids = [p.id for p in corpus]
    n = len(ids)
    if kind == "full":
        return set(ids), n
    kept_count = oracle_kept_count(n, keep_fraction)
    if kind == "sim":
        index, dim, centroid = oracle_reference(task_texts, vocab_size)
        scores = [oracle_similarity(p.text, index, dim, centroid) for p in corpus]
    elif kind == "div":
        scores = [oracle_diversity(p.text) for p in corpus]
    elif kind == "div_sim":
        index, dim, centroid = oracle_reference(task_texts, vocab_size)
        sims = [oracle_similarity(p.text, index, dim, centroid) for p in corpus]
        divs = [oracle_diversity(p.text) for p in corpus]
        scores = [a + b for a, b in zip(oracle_minmax(sims), oracle_minmax(divs))]
    else:
        raise ValueError(kind)
    return oracle_kept(ids, scores, kept_count), kept_count
