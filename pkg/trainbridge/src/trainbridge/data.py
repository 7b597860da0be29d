"""Readers for the corpus-tooling artifacts the bridge consumes.

Everything crosses the component boundary as files: the MLM dataset directory
(train.jsonl / val.jsonl / manifest.json), the added-token list, and the
downstream task JSONL. The manifest is verified before any training starts;
a checksum mismatch refuses to run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ArtifactError

TASK_LABELS = {
    "text_classification": ("yes", "no"),
    "sentiment": ("opportunity", "neutral", "risk"),
    "fact_checking": ("SUPPORTS", "REFUTES"),
}


@dataclass(frozen=True)
class CorpusRow:
    id: str
    source: str
    text: str


def _read_rows(path: Path) -> list[CorpusRow]:
    if not path.exists():
        raise ArtifactError(f"artifact not found: {path}")
    rows: list[CorpusRow] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
                rows.append(CorpusRow(obj["id"], obj["source"], obj["text"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ArtifactError(f"{path}:{line_no}: bad corpus row: {exc}") from exc
    return rows


def _file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _corpus_checksum(rows: list[CorpusRow]) -> str:
    # id-sorted canonical JSON lines, the documented source_checksum rule
    digest = hashlib.sha256()
    for row in sorted(rows, key=lambda r: r.id):
        canonical = json.dumps(
            {"id": row.id, "source": row.source, "text": row.text},
            ensure_ascii=False,
            separators=(",", ":"),
        )
        digest.update(canonical.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


@dataclass(frozen=True)
class MlmDataset:
    train: list[CorpusRow]
    val: list[CorpusRow]
    manifest: dict


def load_mlm_dataset(mlm_dir: str | Path) -> MlmDataset:
    """Load and verify an exported MLM dataset directory."""
    mlm_dir = Path(mlm_dir)
    manifest_path = mlm_dir / "manifest.json"
    if not manifest_path.exists():
        raise ArtifactError(f"manifest not found: {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    train_path, val_path = mlm_dir / "train.jsonl", mlm_dir / "val.jsonl"
    for key, path in (("train_sha256", train_path), ("val_sha256", val_path)):
        recorded = manifest.get(key)
        if recorded is not None and recorded != _file_sha256(path):
            raise ArtifactError(f"manifest checksum mismatch for {path.name}; refusing to run")

    train, val = _read_rows(train_path), _read_rows(val_path)
    if manifest.get("train_count") != len(train) or manifest.get("val_count") != len(val):
        raise ArtifactError("manifest counts do not match the dataset files; refusing to run")
    recomputed = _corpus_checksum(train + val)
    if manifest.get("source_checksum") != recomputed:
        raise ArtifactError("manifest source_checksum mismatch; refusing to run")
    return MlmDataset(train, val, manifest)


def load_added_tokens(path: str | Path | None) -> list[str]:
    """Read the rank-ordered added-token list; None or a missing value means none."""
    if path is None:
        return []
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"added-token file not found: {path}")
    return [
        line.rstrip("\n")
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


@dataclass(frozen=True)
class TaskExample:
    text: str
    label: str


def load_task_dataset(path: str | Path) -> tuple[str, list[TaskExample]]:
    """Read a downstream task JSONL; returns (task name, examples).

    All rows must belong to one task and carry labels legal for it.
    """
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"task dataset not found: {path}")
    task: str | None = None
    examples: list[TaskExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
                row_task, text, label = obj["task"], obj["text"], obj["label"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise ArtifactError(f"{path}:{line_no}: bad task row: {exc}") from exc
            if row_task not in TASK_LABELS:
                raise ArtifactError(f"{path}:{line_no}: unknown task {row_task!r}")
            if task is None:
                task = row_task
            elif row_task != task:
                raise ArtifactError(f"{path}:{line_no}: mixed tasks {task!r} and {row_task!r}")
            if label not in TASK_LABELS[row_task]:
                raise ArtifactError(
                    f"{path}:{line_no}: label {label!r} outside the {row_task!r} schema"
                )
            examples.append(TaskExample(text, label))
    if task is None:
        raise ArtifactError(f"{path}: no examples")
    return task, examples
