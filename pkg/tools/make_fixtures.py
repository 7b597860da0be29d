#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixtures under fixtures/.

Deterministic: a fixed seed drives every choice, so re-running this script
reproduces the files byte-for-byte. fixtures/domain_tokens.txt is a static
data file and is not touched here.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

SEED = 20240817

TOPIC_WORDS = [
    "climate", "carbon", "emissions", "warming", "temperature", "weather",
    "flood", "drought", "storm", "sea", "level", "ice", "glacier", "forest",
    "wildfire", "renewable", "solar", "wind", "energy", "fossil", "fuel",
    "coal", "methane", "policy", "mitigation", "adaptation", "resilience",
    "sustainability", "disclosure", "scenario", "transition", "risk",
    "opportunity", "biodiversity", "ecosystem", "agriculture", "precipitation",
    "heatwave", "ocean", "acidification", "offset", "grid", "turbine",
]

FILLER_WORDS = [
    "the", "a", "of", "and", "to", "in", "for", "on", "with", "by", "from",
    "is", "are", "was", "were", "has", "have", "that", "this", "these",
    "company", "report", "study", "results", "impact", "annual", "global",
    "regional", "measures", "levels", "data", "model", "analysis", "trends",
    "increase", "decrease", "investors", "market", "government", "research",
]

PUNCT = [".", ",", ";", ":"]


def make_sentence(rng: random.Random, length: int) -> str:
    words = []
    for i in range(length):
        pool = TOPIC_WORDS if rng.random() < 0.35 else FILLER_WORDS
        word = rng.choice(pool)
        if i == 0:
            word = word.capitalize()
        words.append(word)
    return " ".join(words) + rng.choice(PUNCT)


def make_paragraph(rng: random.Random, target_words: int) -> str:
    sentences = []
    remaining = target_words
    while remaining > 0:
        n = min(remaining, rng.randint(5, 14))
        sentences.append(make_sentence(rng, n))
        remaining -= n
    return " ".join(sentences)


def write_corpus(rng: random.Random) -> None:
    # length profiles per source: news/reports short, abstracts long
    plan = [
        ("news", 48, (20, 80)),
        ("abstracts", 32, (120, 280)),
        ("reports", 32, (25, 100)),
        (None, 8, (15, 60)),
    ]
    lines: list[str] = []
    texts: list[str] = []
    idx = 0
    for source, count, (lo, hi) in plan:
        for _ in range(count):
            idx += 1
            text = make_paragraph(rng, rng.randint(lo, hi))
            texts.append(text)
            obj: dict = {"id": f"fx{idx:04d}", "text": text}
            if source is not None:
                obj["source"] = source
            lines.append(json.dumps(obj, ensure_ascii=False))
    # planted duplicates: same text modulo case/whitespace, fresh ids
    for dup_no, pick in enumerate(rng.sample(range(len(texts)), 6), start=1):
        idx += 1
        text = texts[pick]
        if dup_no % 2 == 0:
            text = "  " + text.upper() + " "
        lines.append(
            json.dumps({"id": f"fx{idx:04d}", "source": "news", "text": text},
                       ensure_ascii=False)
        )
    # malformed lines, interleaved at fixed offsets
    bad = [
        '{"id": "bad01", "text": ',
        '{"id": "bad02", "source": "news"}',
        '{"id": "bad03", "source": "news", "text": "   "}',
        '{"id": "bad04", "source": "tweets", "text": "short tweet text"}',
        '{"id": "bad05", "source": "news", "text": 42}',
    ]
    for offset, line in zip((7, 23, 51, 88, 113), bad):
        lines.insert(offset, line)
    (FIXTURES / "corpus.jsonl").write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8"
    )


def write_task(rng: random.Random) -> None:
    lines = []
    for i in range(1, 25):
        related = i % 2 == 1
        if related:
            text = make_paragraph(rng, rng.randint(25, 60))
            label = "yes"
        else:
            words = [rng.choice(FILLER_WORDS) for _ in range(rng.randint(25, 60))]
            text = " ".join(words).capitalize() + "."
            label = "no"
        lines.append(
            json.dumps(
                {"id": f"task{i:03d}", "source": "reports", "text": text, "label": label},
                ensure_ascii=False,
            )
        )
    (FIXTURES / "task.jsonl").write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8"
    )


def write_base_vocab() -> None:
    # function words and punctuation a general-language tokenizer already has;
    # topic words are intentionally absent so augmentation has candidates
    tokens = sorted(set(FILLER_WORDS) | set(PUNCT) | {
        "he", "she", "it", "they", "we", "you", "not", "no", "yes", "but",
        "or", "as", "at", "be", "an", "if", "so", "its", "their", "our",
    })
    (FIXTURES / "base_vocab.txt").write_text(
        "".join(t + "\n" for t in tokens), encoding="utf-8"
    )


def write_config() -> None:
    config = {
        "inputs": ["corpus.jsonl"],
        "source_default": "other",
        "out_dir": "out",
        "base_vocab": "base_vocab.txt",
        "task_file": "task.jsonl",
        "dedupe": True,
        "selection": {
            "strategy": "div_sim",
            "keep_fraction": 0.7,
            "reference_vocab_size": 2000,
        },
        "overlap": {"top_n": 500, "mode": "jaccard"},
        "augment": {"k": 25},
        "split": {"train_fraction": 0.8, "seed": 20240817, "input": "selected"},
        "masking": {
            "mask_probability": 0.15,
            "replace_mask_fraction": 0.8,
            "replace_random_fraction": 0.1,
            "keep_fraction": 0.1,
            "seed": 97,
        },
    }
    (FIXTURES / "config.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8"
    )


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    rng = random.Random(SEED)
    write_corpus(rng)
    write_task(rng)
    write_base_vocab()
    write_config()
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
