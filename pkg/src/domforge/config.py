"""Pipeline configuration: one JSON document validated before any stage runs.

Unknown keys are rejected at every level so stale or misspelled settings fail
fast instead of silently doing nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from .errors import DataError

_SOURCE_ENUM = ["news", "abstracts", "reports", "other"]

PIPELINE_CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["out_dir"],
    "properties": {
        "inputs": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "source_default": {"enum": _SOURCE_ENUM},
        "out_dir": {"type": "string"},
        "base_vocab": {"type": "string"},
        "task_file": {"type": "string"},
        "dedupe": {"type": "boolean"},
        "created_at": {"type": "string"},
        "threads": {"type": "integer", "minimum": 1},
        "selection": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "strategy": {"enum": ["full", "sim", "div", "div_sim"]},
                "keep_fraction": {
                    "type": "number",
                    "exclusiveMinimum": 0,
                    "maximum": 1,
                },
                "reference_vocab_size": {"type": "integer", "minimum": 1},
            },
        },
        "overlap": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "top_n": {"type": "integer", "minimum": 1},
                "mode": {"enum": ["jaccard", "directional"]},
            },
        },
        "augment": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"k": {"type": "integer", "minimum": 0}},
        },
        "split": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "train_fraction": {
                    "type": "number",
                    "exclusiveMinimum": 0,
                    "exclusiveMaximum": 1,
                },
                "seed": {"type": "integer", "minimum": 0},
                "stratify_by_source": {"type": "boolean"},
                "input": {"enum": ["selected", "corpus"]},
            },
        },
        "masking": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mask_probability": {"type": "number", "minimum": 0, "maximum": 1},
                "replace_mask_fraction": {"type": "number", "minimum": 0, "maximum": 1},
                "replace_random_fraction": {"type": "number", "minimum": 0, "maximum": 1},
                "keep_fraction": {"type": "number", "minimum": 0, "maximum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
    },
}


@dataclass
class PipelineConfig:
    out_dir: Path
    inputs: list[Path] = field(default_factory=list)
    source_default: str = "other"
    base_vocab: Path | None = None
    task_file: Path | None = None
    dedupe: bool = True
    created_at: str | None = None
    threads: int = 1
    strategy: str = "full"
    keep_fraction: float = 0.7
    reference_vocab_size: int = 10_000
    overlap_top_n: int = 10_000
    overlap_mode: str = "jaccard"
    augment_k: int = 235
    train_fraction: float = 0.8
    split_seed: int = 0
    stratify_by_source: bool = False
    split_input: str = "selected"
    mask_probability: float = 0.15
    replace_mask_fraction: float = 0.8
    replace_random_fraction: float = 0.1
    mask_keep_fraction: float = 0.1
    mask_seed: int = 0

    @classmethod
    def from_mapping(cls, data: Mapping, base_dir: Path | None = None) -> "PipelineConfig":
        try:
            jsonschema.validate(data, PIPELINE_CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise DataError(f"invalid config at {path}: {exc.message}") from exc

        def respath(value: str) -> Path:
            p = Path(value)
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            return p

        selection = data.get("selection", {})
        overlap = data.get("overlap", {})
        augment = data.get("augment", {})
        split = data.get("split", {})
        masking = data.get("masking", {})
        return cls(
            out_dir=respath(data["out_dir"]),
            inputs=[respath(p) for p in data.get("inputs", [])],
            source_default=data.get("source_default", "other"),
            base_vocab=respath(data["base_vocab"]) if "base_vocab" in data else None,
            task_file=respath(data["task_file"]) if "task_file" in data else None,
            dedupe=data.get("dedupe", True),
            created_at=data.get("created_at"),
            threads=data.get("threads", 1),
            strategy=selection.get("strategy", "full"),
            keep_fraction=selection.get("keep_fraction", 0.7),
            reference_vocab_size=selection.get("reference_vocab_size", 10_000),
            overlap_top_n=overlap.get("top_n", 10_000),
            overlap_mode=overlap.get("mode", "jaccard"),
            augment_k=augment.get("k", 235),
            train_fraction=split.get("train_fraction", 0.8),
            split_seed=split.get("seed", 0),
            stratify_by_source=split.get("stratify_by_source", False),
            split_input=split.get("input", "selected"),
            mask_probability=masking.get("mask_probability", 0.15),
            replace_mask_fraction=masking.get("replace_mask_fraction", 0.8),
            replace_random_fraction=masking.get("replace_random_fraction", 0.1),
            mask_keep_fraction=masking.get("keep_fraction", 0.1),
            mask_seed=masking.get("seed", 0),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"config {path} is not valid JSON: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise DataError(f"config {path} must be a JSON object")
        return cls.from_mapping(data, base_dir=path.parent)
