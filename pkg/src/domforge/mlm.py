"""MLM data preparation: train/validation split, token masking, dataset export.

All randomness flows through a counter-based generator (Philox) keyed by the
seed recorded in the export manifest, so the same inputs and config always
reproduce byte-identical artifacts. Masking here serves preview, statistics
and golden tests; training-time masking happens again in the bridge.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Corpus, corpus_checksum, export_jsonl
from .errors import DataError

IGNORE_INDEX = -100
MAX_SEED = 2**64

# deterministic default; override via config, argument, or SOURCE_DATE_EPOCH
EPOCH_TIMESTAMP = "1970-01-01T00:00:00Z"


def _check_seed(seed: int) -> int:
    if not (0 <= seed < MAX_SEED):
        raise DataError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _rng(seed: int, counter: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    train_fraction: float = 0.8

    def __post_init__(self) -> None:
        _check_seed(self.seed)
        if not (0.0 < self.train_fraction < 1.0):
            raise DataError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def _train_size(n: int, fraction: float) -> int:
    return int(round(Fraction(str(fraction)) * n))


def split_train_val(
    corpus: Corpus, spec: SplitSpec, stratify_by_source: bool = False
) -> tuple[Corpus, Corpus]:
    """Random disjoint, exhaustive split; |train| = round(train_fraction * N).

    Both halves keep the original corpus order. With ``stratify_by_source``
    the fraction is applied within each source group instead.
    """
    n = len(corpus)
    if n < 2:
        raise DataError(f"corpus too small to split: {n} paragraph(s)")
    rng = _rng(spec.seed)
    train_idx: set[int] = set()
    if stratify_by_source:
        groups: dict[str, list[int]] = {}
        for i, p in enumerate(corpus):
            groups.setdefault(p.source.value, []).append(i)
        for name in sorted(groups):
            idx = groups[name]
            perm = rng.permutation(len(idx))
            take = _train_size(len(idx), spec.train_fraction)
            train_idx.update(idx[j] for j in perm[:take])
    else:
        perm = rng.permutation(n)
        train_idx.update(int(j) for j in perm[: _train_size(n, spec.train_fraction)])

    train = tuple(p for i, p in enumerate(corpus) if i in train_idx)
    val = tuple(p for i, p in enumerate(corpus) if i not in train_idx)
    prov = dict(corpus.provenance)
    prov.update({"split_seed": spec.seed, "train_fraction": spec.train_fraction})
    return (
        Corpus(train, {**prov, "split": "train"}),
        Corpus(val, {**prov, "split": "val"}),
    )


@dataclass(frozen=True)
class MaskingConfig:
    mask_token_id: int
    vocab_size: int
    seed: int
    mask_probability: float = 0.15
    replace_mask_fraction: float = 0.8
    replace_random_fraction: float = 0.1
    keep_fraction: float = 0.1
    special_token_ids: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        _check_seed(self.seed)
        if not (0.0 <= self.mask_probability <= 1.0):
            raise DataError(f"mask_probability must be in [0, 1], got {self.mask_probability}")
        total = self.replace_mask_fraction + self.replace_random_fraction + self.keep_fraction
        if abs(total - 1.0) > 1e-9:
            raise DataError(f"mask/random/keep fractions must sum to 1, got {total}")
        if min(self.replace_mask_fraction, self.replace_random_fraction, self.keep_fraction) < 0:
            raise DataError("mask/random/keep fractions must be non-negative")
        if self.vocab_size < 1:
            raise DataError(f"vocab_size must be >= 1, got {self.vocab_size}")
        if not (0 <= self.mask_token_id < self.vocab_size):
            raise DataError("mask_token_id must lie inside the vocabulary")
        if not isinstance(self.special_token_ids, frozenset):
            object.__setattr__(self, "special_token_ids", frozenset(self.special_token_ids))


@dataclass(frozen=True)
class MaskedBatch:
    input_ids: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.input_ids.shape != self.labels.shape:
            raise DataError("input_ids and labels must have equal length")

    @property
    def selected(self) -> np.ndarray:
        return self.labels != IGNORE_INDEX


def mask_tokens(
    token_ids: Sequence[int] | np.ndarray, cfg: MaskingConfig, sequence_index: int = 0
) -> MaskedBatch:
    """Select each non-special position independently with ``mask_probability``.

    Selected positions become the mask token, a random token, or stay
    unchanged per the configured fractions; labels carry the original id at
    selected positions and IGNORE_INDEX elsewhere. The random stream is a pure
    function of (seed, sequence_index).
    """
    ids = np.asarray(token_ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= cfg.vocab_size):
        raise DataError("token ids must lie in [0, vocab_size)")
    rng = _rng(cfg.seed, counter=sequence_index)
    n = ids.size
    u = rng.random(n)
    v = rng.random(n)
    r = rng.integers(0, cfg.vocab_size, size=n, dtype=np.int64)

    if cfg.special_token_ids:
        special = np.isin(ids, np.fromiter(cfg.special_token_ids, dtype=np.int64))
    else:
        special = np.zeros(n, dtype=bool)
    selected = (u < cfg.mask_probability) & ~special

    input_ids = ids.copy()
    to_mask = selected & (v < cfg.replace_mask_fraction)
    to_random = selected & ~to_mask & (v < cfg.replace_mask_fraction + cfg.replace_random_fraction)
    input_ids[to_mask] = cfg.mask_token_id
    input_ids[to_random] = r[to_random]

    labels = np.full(n, IGNORE_INDEX, dtype=np.int64)
    labels[selected] = ids[selected]
    return MaskedBatch(input_ids, labels)


def resolve_created_at(explicit: str | None = None) -> str:
    """Deterministic timestamp: explicit value, else SOURCE_DATE_EPOCH, else epoch."""
    if explicit:
        return explicit
    sde = os.environ.get("SOURCE_DATE_EPOCH")
    if sde:
        from datetime import datetime, timezone

        dt = datetime.fromtimestamp(int(sde), tz=timezone.utc)
        return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
    return EPOCH_TIMESTAMP


def _file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def export_mlm_dataset(
    train: Corpus,
    val: Corpus,
    out_dir: str | Path,
    spec: SplitSpec,
    created_at: str | None = None,
) -> dict:
    """Write train.jsonl, val.jsonl and manifest.json; returns the manifest.

    ``source_checksum`` is the id-sorted corpus checksum over train + val, so
    consumers can re-derive it from the two files alone. The per-file sha256
    entries let the training bridge refuse tampered inputs.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        train_path = out_dir / "train.jsonl"
        val_path = out_dir / "val.jsonl"
        export_jsonl(train, train_path)
        export_jsonl(val, val_path)
    except OSError as exc:
        raise DataError(f"cannot write MLM dataset under {out_dir}: {exc}") from exc

    combined = Corpus(tuple(train.paragraphs) + tuple(val.paragraphs))
    manifest = {
        "train_count": len(train),
        "val_count": len(val),
        "train_fraction": spec.train_fraction,
        "seed": spec.seed,
        "source_checksum": corpus_checksum(combined),
        "created_at": resolve_created_at(created_at),
        "train_sha256": _file_sha256(train_path),
        "val_sha256": _file_sha256(val_path),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def render_mask_preview(
    tokens: Sequence[str], batch: MaskedBatch, id_to_token: dict[int, str]
) -> str:
    """Aligned original / masked-input / label rows for human inspection."""
    if len(tokens) != batch.input_ids.size:
        raise DataError("token strings and ids must have equal length")
    masked = [id_to_token.get(int(i), f"<{i}>") for i in batch.input_ids]
    labels = [
        id_to_token.get(int(l), f"<{l}>") if l != IGNORE_INDEX else "."
        for l in batch.labels
    ]
    widths = [
        max(len(tokens[i]), len(masked[i]), len(labels[i])) for i in range(len(tokens))
    ]
    rows = []
    for name, cells in (("original", tokens), ("masked", masked), ("label", labels)):
        rows.append(
            f"{name:>8}  " + " ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
        )
    n_selected = int(batch.selected.sum())
    rows.append(f"{'':>8}  ({n_selected} of {len(tokens)} positions selected)")
    return "\n".join(rows)


def masked_fraction(batch: MaskedBatch) -> float:
    if batch.labels.size == 0:
        return 0.0
    return float(batch.selected.mean())
