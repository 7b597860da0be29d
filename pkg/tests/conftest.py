import random
from pathlib import Path

import pytest

from domforge.corpus import Corpus, Paragraph, Source

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

WORD_POOL = [
    "climate", "risk", "carbon", "energy", "policy", "flood", "heat",
    "ocean", "model", "data", "storm", "market", "report", "level",
]


def make_corpus(
    rng: random.Random,
    n: int,
    pool: list[str] | None = None,
    min_len: int = 3,
    max_len: int = 40,
    dup_fraction: float = 0.0,
) -> Corpus:
    """Seeded synthetic corpus; dup_fraction plants exact duplicate texts."""
    pool = pool or WORD_POOL
    paragraphs = []
    texts: list[str] = []
    for i in range(n):
        if texts and rng.random() < dup_fraction:
            text = rng.choice(texts)
        else:
            text = " ".join(rng.choice(pool) for _ in range(rng.randint(min_len, max_len)))
        texts.append(text)
        paragraphs.append(Paragraph(f"id{i:05d}", Source.NEWS, text))
    return Corpus(tuple(paragraphs))


def make_texts(rng: random.Random, n: int, pool: list[str] | None = None,
               min_len: int = 3, max_len: int = 30) -> list[str]:
    pool = pool or WORD_POOL
    return [
        " ".join(rng.choice(pool) for _ in range(rng.randint(min_len, max_len)))
        for _ in range(n)
    ]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
