import hashlib
import json
import random
from pathlib import Path

import pytest

from trainbridge.config import TrainConfig

TOPIC = ["climate", "carbon", "emissions", "flood", "energy", "policy", "risk",
         "solar", "wind", "ocean", "forest", "drought"]
FILLER = ["the", "a", "of", "and", "to", "in", "for", "on", "with", "report",
          "annual", "data", "study", "results", "market"]

SENTIMENT_CUES = {
    "risk": ["threat", "loss", "exposure", "adverse", "damage"],
    "opportunity": ["growth", "benefit", "upside", "investment", "innovation"],
    "neutral": ["statement", "figure", "overview", "method", "baseline"],
}


def make_text(rng: random.Random, n_words: int, cues: list[str] | None = None) -> str:
    words = []
    for _ in range(n_words):
        pool = cues if (cues and rng.random() < 0.5) else (TOPIC if rng.random() < 0.4 else FILLER)
        words.append(rng.choice(pool))
    return " ".join(words)


def corpus_rows(rng: random.Random, n: int) -> list[dict]:
    return [
        {
            "id": f"p{i:05d}",
            "source": rng.choice(["news", "abstracts", "reports"]),
            "text": make_text(rng, rng.randint(8, 40)),
        }
        for i in range(n)
    ]


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows),
                    encoding="utf-8")


def canonical_checksum(rows: list[dict]) -> str:
    digest = hashlib.sha256()
    for row in sorted(rows, key=lambda r: r["id"]):
        line = json.dumps(
            {"id": row["id"], "source": row["source"], "text": row["text"]},
            ensure_ascii=False,
            separators=(",", ":"),
        )
        digest.update(line.encode("utf-8") + b"\n")
    return digest.hexdigest()


def file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_mlm_dir(tmp_path: Path, rows: list[dict], train_fraction: float = 0.8,
                  seed: int = 7) -> Path:
    """Artifacts in the exporter's documented layout, built independently."""
    mlm = tmp_path / "mlm"
    mlm.mkdir(parents=True, exist_ok=True)
    cut = round(len(rows) * train_fraction)
    train, val = rows[:cut], rows[cut:]
    write_jsonl(mlm / "train.jsonl", train)
    write_jsonl(mlm / "val.jsonl", val)
    manifest = {
        "train_count": len(train),
        "val_count": len(val),
        "train_fraction": train_fraction,
        "seed": seed,
        "source_checksum": canonical_checksum(rows),
        "created_at": "1970-01-01T00:00:00Z",
        "train_sha256": file_sha256(mlm / "train.jsonl"),
        "val_sha256": file_sha256(mlm / "val.jsonl"),
    }
    (mlm / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return mlm


def write_base_vocab(path: Path) -> Path:
    tokens = sorted(set(FILLER) | {".", ",", ";"})
    path.write_text("".join(t + "\n" for t in tokens), encoding="utf-8")
    return path


def write_added_tokens(path: Path, tokens: list[str]) -> Path:
    path.write_text("".join(t + "\n" for t in tokens), encoding="utf-8")
    return path


def sentiment_task_rows(rng: random.Random, n: int) -> list[dict]:
    labels = ["risk", "opportunity", "neutral"]
    rows = []
    for i in range(n):
        label = labels[i % 3]
        rows.append(
            {
                "task": "sentiment",
                "text": make_text(rng, rng.randint(10, 25), SENTIMENT_CUES[label]),
                "label": label,
            }
        )
    return rows


def binary_task_rows(rng: random.Random, n: int) -> list[dict]:
    rows = []
    for i in range(n):
        related = i % 2 == 0
        cues = TOPIC if related else None
        text = make_text(rng, rng.randint(10, 25), cues if related else ["meeting", "agenda", "minutes"])
        rows.append({"task": "text_classification", "text": text,
                     "label": "yes" if related else "no"})
    return rows


@pytest.fixture
def toy_config() -> TrainConfig:
    config = TrainConfig()
    config.model.num_layers = 2
    config.model.hidden_size = 64
    config.model.num_heads = 4
    config.model.ffn_size = 128
    config.model.max_seq_len = 48
    config.pretrain.batch_size = 32
    config.pretrain.micro_batch_size = 16
    config.pretrain.epochs = 2
    config.downstream.max_epochs = 8
    config.max_steps = 300
    return config
