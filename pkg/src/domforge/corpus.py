"""Paragraph corpora: JSONL ingestion, normalization, deduplication and descriptive statistics.

A corpus is an ordered, id-unique sequence of paragraphs. Ingestion never drops a
line silently: every line that fails the input schema is recorded in an error
report with its line number.
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import DataError

VALID_SOURCES = ("news", "abstracts", "reports", "other")


class Source(str, Enum):
    NEWS = "news"
    ABSTRACTS = "abstracts"
    REPORTS = "reports"
    OTHER = "other"


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs (Unicode whitespace)."""
    return len(text.split())


def normalize_text(text: str) -> str:
    """NFC + lowercase + whitespace collapse; the key used for deduplication."""
    return " ".join(unicodedata.normalize("NFC", text).lower().split())


@dataclass(frozen=True)
class Paragraph:
    """One corpus unit. ``word_count`` is derived from ``text`` at construction."""

    id: str
    source: Source
    text: str
    word_count: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.source, Source):
            object.__setattr__(self, "source", Source(self.source))
        if not normalize_text(self.text):
            raise DataError(f"paragraph {self.id!r}: empty text")
        object.__setattr__(self, "word_count", word_count(self.text))


@dataclass(frozen=True)
class Corpus:
    """Ordered paragraph sequence with unique ids plus free-form provenance."""

    paragraphs: tuple[Paragraph, ...]
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for p in self.paragraphs:
            if p.id in seen:
                raise DataError(f"duplicate paragraph id: {p.id!r}")
            seen.add(p.id)

    def __len__(self) -> int:
        return len(self.paragraphs)

    def __iter__(self) -> Iterator[Paragraph]:
        return iter(self.paragraphs)

    def ids(self) -> list[str]:
        return [p.id for p in self.paragraphs]

    def texts(self) -> list[str]:
        return [p.text for p in self.paragraphs]


@dataclass(frozen=True)
class LineError:
    """One rejected input line. ``file`` is set when ingesting multiple files."""

    line: int
    reason: str
    file: str | None = None

    def to_json_obj(self) -> dict:
        obj: dict = {"line": self.line, "reason": self.reason}
        if self.file is not None:
            obj["file"] = self.file
        return obj


@dataclass(frozen=True)
class IngestResult:
    corpus: Corpus
    errors: tuple[LineError, ...]


def _parse_line(raw: str, line_no: int, source_default: Source, file_label: str | None):
    """Returns (id or None, source, text) or a LineError."""
    stripped = raw.strip()
    if not stripped:
        return LineError(line_no, "blank line", file_label)
    try:
        obj = json.loads(stripped)
    except json.JSONDecodeError as exc:
        return LineError(line_no, f"invalid JSON: {exc.msg}", file_label)
    if not isinstance(obj, dict):
        return LineError(line_no, "not a JSON object", file_label)
    text = obj.get("text")
    if text is None:
        return LineError(line_no, "missing 'text' field", file_label)
    if not isinstance(text, str):
        return LineError(line_no, "'text' must be a string", file_label)
    if not normalize_text(text):
        return LineError(line_no, "empty 'text'", file_label)
    pid = obj.get("id")
    if pid is not None and not isinstance(pid, str):
        return LineError(line_no, "'id' must be a string", file_label)
    raw_source = obj.get("source")
    if raw_source is None:
        source = source_default
    elif isinstance(raw_source, str) and raw_source in VALID_SOURCES:
        source = Source(raw_source)
    else:
        return LineError(line_no, f"invalid 'source': {raw_source!r}", file_label)
    return pid, source, text


def ingest_jsonl(
    stream: Iterable[str | bytes] | IO,
    source_default: Source | str = Source.OTHER,
    *,
    id_prefix: str = "p",
    file_label: str | None = None,
) -> IngestResult:
    """Ingest newline-delimited JSON objects with at least a "text" field.

    Missing ids are generated sequentially from the line number. Lines failing
    the schema (bad JSON, missing/empty/non-string text, unknown source,
    duplicate id) are reported, never silently dropped. An empty stream yields
    an empty corpus.
    """
    source_default = Source(source_default)
    paragraphs: list[Paragraph] = []
    errors: list[LineError] = []
    seen_ids: set[str] = set()
    for line_no, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        parsed = _parse_line(raw, line_no, source_default, file_label)
        if isinstance(parsed, LineError):
            errors.append(parsed)
            continue
        pid, source, text = parsed
        if pid is None:
            pid = f"{id_prefix}{line_no:06d}"
        if pid in seen_ids:
            errors.append(LineError(line_no, f"duplicate id: {pid!r}", file_label))
            continue
        seen_ids.add(pid)
        paragraphs.append(Paragraph(pid, source, text))
    provenance = {"source_default": source_default.value}
    if file_label is not None:
        provenance["files"] = [file_label]
    return IngestResult(Corpus(tuple(paragraphs), provenance), tuple(errors))


def ingest_paths(
    paths: Iterable[str | Path], source_default: Source | str = Source.OTHER
) -> IngestResult:
    """Ingest several JSONL files; final ordering is (file order, line order)."""
    source_default = Source(source_default)
    paragraphs: list[Paragraph] = []
    errors: list[LineError] = []
    seen_ids: set[str] = set()
    labels: list[str] = []
    for path in paths:
        path = Path(path)
        labels.append(path.name)
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                parsed = _parse_line(raw, line_no, source_default, path.name)
                if isinstance(parsed, LineError):
                    errors.append(parsed)
                    continue
                pid, source, text = parsed
                if pid is None:
                    pid = f"{path.stem}:{line_no:06d}"
                if pid in seen_ids:
                    errors.append(
                        LineError(line_no, f"duplicate id: {pid!r}", path.name)
                    )
                    continue
                seen_ids.add(pid)
                paragraphs.append(Paragraph(pid, source, text))
    provenance = {"source_default": source_default.value, "files": labels}
    return IngestResult(Corpus(tuple(paragraphs), provenance), tuple(errors))


def export_jsonl(corpus: Corpus, out: IO | str | Path) -> None:
    """Write a corpus as JSONL; id, source and text survive a re-ingest byte-exactly."""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            export_jsonl(corpus, fh)
        return
    for p in corpus:
        out.write(paragraph_json_line(p))
        out.write("\n")


def paragraph_json_line(p: Paragraph) -> str:
    return json.dumps(
        {"id": p.id, "source": p.source.value, "text": p.text},
        ensure_ascii=False,
        separators=(",", ":"),
    )


def read_corpus_jsonl(path: str | Path, source_default: Source | str = Source.OTHER) -> Corpus:
    """Read a previously exported corpus; any rejected line is a hard error."""
    with open(path, "r", encoding="utf-8") as fh:
        result = ingest_jsonl(fh, source_default, file_label=Path(path).name)
    if result.errors:
        first = result.errors[0]
        raise DataError(
            f"{path}: {len(result.errors)} invalid line(s); first at line "
            f"{first.line}: {first.reason}"
        )
    return result.corpus


def write_error_report(errors: Iterable[LineError], out: IO | str | Path) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_error_report(errors, fh)
        return
    for err in errors:
        out.write(json.dumps(err.to_json_obj(), ensure_ascii=False) + "\n")


def dedupe(corpus: Corpus) -> tuple[Corpus, int]:
    """Drop paragraphs whose normalized text was already seen; first occurrence wins."""
    seen: set[str] = set()
    kept: list[Paragraph] = []
    for p in corpus:
        key = normalize_text(p.text)
        if key in seen:
            continue
        seen.add(key)
        kept.append(p)
    removed = len(corpus) - len(kept)
    return Corpus(tuple(kept), dict(corpus.provenance)), removed


def corpus_checksum(corpus: Corpus) -> str:
    """SHA-256 over the canonical JSON lines of all paragraphs sorted by id.

    Order-free so it can be recomputed from a train/val partition of the same
    corpus. This is the `source_checksum` contract consumed by the training
    bridge.
    """
    digest = hashlib.sha256()
    for p in sorted(corpus, key=lambda q: q.id):
        digest.update(paragraph_json_line(p).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


@dataclass(frozen=True)
class SourceStats:
    paragraph_count: int
    q1: float
    mean: float
    q3: float


@dataclass(frozen=True)
class CorpusStats:
    per_source: dict[str, SourceStats]
    total: SourceStats


def _stats_for(counts: list[int]) -> SourceStats:
    arr = np.asarray(counts, dtype=np.float64)
    # linear interpolation between order statistics (the "type 7" rule)
    q1 = float(np.quantile(arr, 0.25, method="linear"))
    q3 = float(np.quantile(arr, 0.75, method="linear"))
    return SourceStats(len(counts), q1, float(arr.mean()), q3)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Per-source and total paragraph counts plus Q1/mean/Q3 of word counts."""
    if len(corpus) == 0:
        raise DataError("no paragraphs")
    by_source: dict[str, list[int]] = {}
    for p in corpus:
        by_source.setdefault(p.source.value, []).append(p.word_count)
    per_source = {
        name: _stats_for(by_source[name]) for name in VALID_SOURCES if name in by_source
    }
    total = _stats_for([p.word_count for p in corpus])
    return CorpusStats(per_source, total)


def stats_to_json(stats: CorpusStats) -> dict:
    def as_obj(s: SourceStats) -> dict:
        return {
            "paragraph_count": s.paragraph_count,
            "q1": s.q1,
            "mean": s.mean,
            "q3": s.q3,
        }

    return {
        "per_source": {name: as_obj(s) for name, s in stats.per_source.items()},
        "total": as_obj(stats.total),
    }


def stats_from_json(obj: dict) -> CorpusStats:
    def from_obj(row: dict) -> SourceStats:
        return SourceStats(row["paragraph_count"], row["q1"], row["mean"], row["q3"])

    return CorpusStats(
        {name: from_obj(row) for name, row in obj["per_source"].items()},
        from_obj(obj["total"]),
    )


def render_stats_table(stats: CorpusStats) -> str:
    """Plain-text table; quantiles and means rendered to the nearest integer."""
    rows = [("Dataset", "Paragraphs", "Q1", "Mean", "Q3")]
    for name, s in stats.per_source.items():
        rows.append(
            (name, f"{s.paragraph_count}", f"{round(s.q1)}", f"{round(s.mean)}", f"{round(s.q3)}")
        )
    t = stats.total
    rows.append(("total", f"{t.paragraph_count}", f"{round(t.q1)}", f"{round(t.mean)}", f"{round(t.q3)}"))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0 or idx == len(rows) - 2:
            lines.append("-" * (sum(widths) + 8))
    return "\n".join(lines)
