"""Pipeline stages behind the CLI subcommands.

Each stage reads its inputs from files under the configured output directory
and writes artifacts with fixed names, so running the stages one by one is
artifact-identical to the `pipeline` command, which simply runs them in order.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

from . import corpus as corpus_mod
from . import selection as selection_mod
from . import vocab as vocab_mod
from .config import PipelineConfig
from .errors import DataError, UsageError
from .mlm import SplitSpec, export_mlm_dataset, split_train_val

logger = logging.getLogger(__name__)

CORPUS_FILE = "corpus.jsonl"
ERRORS_FILE = "ingest_errors.jsonl"
INGEST_SUMMARY_FILE = "ingest_summary.json"
STATS_FILE = "stats.json"
OVERLAP_FILE = "overlap.json"
SELECTED_FILE = "selected.jsonl"
MLM_DIR = "mlm"
PIPELINE_MANIFEST_FILE = "pipeline_manifest.json"


def _write_json(path: Path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _corpus_path(cfg: PipelineConfig) -> Path:
    path = cfg.out_dir / CORPUS_FILE
    if not path.exists():
        raise DataError(f"corpus artifact not found: {path} (run `ingest` first)")
    return path


def stage_ingest(cfg: PipelineConfig) -> dict:
    if not cfg.inputs:
        raise UsageError("no input files configured")
    for path in cfg.inputs:
        if not path.exists():
            raise DataError(f"input file not found: {path}")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    result = corpus_mod.ingest_paths(cfg.inputs, cfg.source_default)
    working = result.corpus
    removed = 0
    if cfg.dedupe:
        working, removed = corpus_mod.dedupe(working)
    corpus_mod.export_jsonl(working, cfg.out_dir / CORPUS_FILE)
    corpus_mod.write_error_report(result.errors, cfg.out_dir / ERRORS_FILE)
    summary = {
        "paragraphs": len(working),
        "ingested": len(result.corpus),
        "removed_duplicates": removed,
        "error_lines": len(result.errors),
    }
    _write_json(cfg.out_dir / INGEST_SUMMARY_FILE, summary)
    logger.info(
        "ingested %d paragraph(s), %d duplicate(s) removed, %d error line(s)",
        len(working), removed, len(result.errors),
    )
    return summary


def stage_stats(cfg: PipelineConfig, corpus_path: Path | None = None) -> dict:
    path = corpus_path or _corpus_path(cfg)
    stats = corpus_mod.corpus_stats(corpus_mod.read_corpus_jsonl(path, cfg.source_default))
    obj = corpus_mod.stats_to_json(stats)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(cfg.out_dir / STATS_FILE, obj)
    return obj


def _vocab_from(path: Path, kind: str, top_n: int, source_default: str) -> vocab_mod.VocabSet:
    if kind == "corpus":
        corpus = corpus_mod.read_corpus_jsonl(path, source_default)
        table = vocab_mod.term_frequencies(corpus)
        return vocab_mod.top_n_vocabulary(table, top_n, label=path.name)
    if kind == "vocab":
        return vocab_mod.read_vocab_file(path)
    raise UsageError(f"unknown vocabulary kind: {kind!r}")


def stage_overlap(
    cfg: PipelineConfig,
    a: Path | None = None,
    b: Path | None = None,
    a_kind: str = "corpus",
    b_kind: str = "vocab",
) -> dict:
    a = a or _corpus_path(cfg)
    if b is None:
        if cfg.base_vocab is None:
            raise UsageError("overlap needs a base vocabulary (config `base_vocab` or --b)")
        b = cfg.base_vocab
    vocab_a = _vocab_from(a, a_kind, cfg.overlap_top_n, cfg.source_default)
    vocab_b = _vocab_from(b, b_kind, cfg.overlap_top_n, cfg.source_default)
    pct = vocab_mod.vocabulary_overlap(vocab_a, vocab_b, cfg.overlap_mode)
    obj = {
        "a": a.name,
        "b": b.name,
        "a_size": len(vocab_a),
        "b_size": len(vocab_b),
        "mode": cfg.overlap_mode,
        "top_n": cfg.overlap_top_n,
        "overlap_percent": pct,
    }
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(cfg.out_dir / OVERLAP_FILE, obj)
    return obj


def stage_select(cfg: PipelineConfig) -> dict:
    strategy = selection_mod.SelectionStrategy(
        selection_mod.StrategyKind(cfg.strategy), cfg.keep_fraction
    )
    # usage problems must surface before any data is touched
    if strategy.needs_task and cfg.task_file is None:
        raise UsageError(
            f"strategy {cfg.strategy!r} requires a task file (config `task_file`)"
        )
    task = None
    if strategy.needs_task:
        if not cfg.task_file.exists():
            raise DataError(f"task file not found: {cfg.task_file}")
        task_corpus = corpus_mod.read_corpus_jsonl(cfg.task_file, cfg.source_default)
        task = selection_mod.build_task_reference(
            task_corpus.texts(), cfg.reference_vocab_size
        )
    corpus = corpus_mod.read_corpus_jsonl(_corpus_path(cfg), cfg.source_default)
    result = selection_mod.select(corpus, strategy, task)
    return selection_mod.export_selection(corpus, result, cfg.out_dir)


def stage_augment(cfg: PipelineConfig) -> dict:
    if cfg.base_vocab is None:
        raise UsageError("augment-vocab needs a base vocabulary (config `base_vocab`)")
    if not cfg.base_vocab.exists():
        raise DataError(f"base vocabulary not found: {cfg.base_vocab}")
    corpus = corpus_mod.read_corpus_jsonl(_corpus_path(cfg), cfg.source_default)
    base = vocab_mod.read_vocab_file(cfg.base_vocab, label="base")
    table = vocab_mod.term_frequencies(corpus)
    augmented = vocab_mod.augment_vocabulary(base, table, cfg.augment_k)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    vocab_mod.write_augmented_json(augmented, cfg.out_dir / "augmented_vocab.json")
    vocab_mod.write_added_tokens(augmented, cfg.out_dir / "added_tokens.txt")
    return vocab_mod.augmented_to_json(augmented)


def stage_split(cfg: PipelineConfig) -> dict:
    if cfg.split_input == "selected":
        source = cfg.out_dir / SELECTED_FILE
        if not source.exists():
            raise DataError(f"selected corpus not found: {source} (run `select` first)")
    else:
        source = _corpus_path(cfg)
    corpus = corpus_mod.read_corpus_jsonl(source, cfg.source_default)
    spec = SplitSpec(seed=cfg.split_seed, train_fraction=cfg.train_fraction)
    train, val = split_train_val(corpus, spec, cfg.stratify_by_source)
    return export_mlm_dataset(
        train, val, cfg.out_dir / MLM_DIR, spec, created_at=cfg.created_at
    )


_PIPELINE_ARTIFACTS = (
    CORPUS_FILE,
    ERRORS_FILE,
    INGEST_SUMMARY_FILE,
    STATS_FILE,
    OVERLAP_FILE,
    "selection_scores.jsonl",
    SELECTED_FILE,
    "selection_summary.json",
    "augmented_vocab.json",
    "added_tokens.txt",
    f"{MLM_DIR}/train.jsonl",
    f"{MLM_DIR}/val.jsonl",
    f"{MLM_DIR}/manifest.json",
)


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every configured stage in order and write an artifact manifest."""
    stages: list[str] = ["ingest", "stats"]
    stage_ingest(cfg)
    stage_stats(cfg)
    if cfg.base_vocab is not None:
        stage_overlap(cfg)
        stages.append("overlap")
    stage_select(cfg)
    stages.append("select")
    if cfg.base_vocab is not None:
        stage_augment(cfg)
        stages.append("augment-vocab")
    stage_split(cfg)
    stages.append("split")

    artifacts = {}
    for rel in _PIPELINE_ARTIFACTS:
        path = cfg.out_dir / rel
        if path.exists():
            artifacts[rel] = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest = {"stages": stages, "artifacts": artifacts}
    _write_json(cfg.out_dir / PIPELINE_MANIFEST_FILE, manifest)
    return manifest
