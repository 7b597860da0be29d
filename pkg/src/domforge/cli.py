"""Command-line entry point exposing the full pipeline as subcommands.

Exit codes: 0 success, 1 usage error, 2 data error. Errors are emitted as a
structured JSON object on stderr. Verbosity is controlled by the DOMFORGE_LOG
environment variable (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import carbon as carbon_mod
from . import evalkit
from . import pipeline as stages
from .config import PipelineConfig
from .errors import DataError, DomforgeError, UsageError
from .mlm import MaskingConfig, mask_tokens, render_mask_preview
from .vocab import tokenize_words

logger = logging.getLogger("domforge")

SUBCOMMANDS = (
    "ingest",
    "stats",
    "overlap",
    "select",
    "augment-vocab",
    "split",
    "mask-preview",
    "pairs",
    "aggregate",
    "improvements",
    "carbon",
    "pipeline",
)


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems as UsageError (exit 1)."""

    def error(self, message: str):
        raise UsageError(message)


def _setup_logging() -> None:
    level_name = os.environ.get("DOMFORGE_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _print_json(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True))


def _add_config_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="pipeline config JSON")
    p.add_argument("--out-dir", type=Path, help="output directory (overrides config)")
    p.add_argument("--threads", type=int, help="parallelism cap (stages run within it)")


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    if args.config is not None:
        cfg = PipelineConfig.from_file(args.config)
    else:
        if getattr(args, "out_dir", None) is None:
            raise UsageError("either --config or --out-dir is required")
        cfg = PipelineConfig(out_dir=args.out_dir)
    overrides = {
        "out_dir": "out_dir",
        "inputs": "inputs",
        "source_default": "source_default",
        "base_vocab": "base_vocab",
        "task_file": "task_file",
        "strategy": "strategy",
        "keep_fraction": "keep_fraction",
        "k": "augment_k",
        "train_fraction": "train_fraction",
        "seed": "split_seed",
        "split_input": "split_input",
        "top_n": "overlap_top_n",
        "mode": "overlap_mode",
        "threads": "threads",
    }
    for arg_name, cfg_name in overrides.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(cfg, cfg_name, value)
    if getattr(args, "no_dedupe", False):
        cfg.dedupe = False
    if cfg.threads < 1:
        raise UsageError(f"--threads must be >= 1, got {cfg.threads}")
    return cfg


def _build_parser() -> _Parser:
    parser = _Parser(prog="domforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="|".join(SUBCOMMANDS))

    p = sub.add_parser("ingest", help="ingest JSONL corpora, normalize, dedupe")
    _add_config_arg(p)
    p.add_argument("--inputs", nargs="+", type=Path, help="input JSONL files")
    p.add_argument("--source-default", choices=("news", "abstracts", "reports", "other"))
    p.add_argument("--no-dedupe", action="store_true", help="skip deduplication")

    p = sub.add_parser("stats", help="per-source descriptive statistics")
    _add_config_arg(p)
    p.add_argument("--corpus", type=Path, help="corpus JSONL (default: out_dir/corpus.jsonl)")
    p.add_argument("--table", action="store_true",
                   help="print a text table (integers) instead of JSON")

    p = sub.add_parser("overlap", help="vocabulary overlap between two sources")
    _add_config_arg(p)
    p.add_argument("--a", type=Path, help="left input (default: out_dir/corpus.jsonl)")
    p.add_argument("--b", type=Path, help="right input (default: config base_vocab)")
    p.add_argument("--a-kind", choices=("corpus", "vocab"), default="corpus")
    p.add_argument("--b-kind", choices=("corpus", "vocab"), default="vocab")
    p.add_argument("--top-n", type=int, help="vocabulary size per corpus side")
    p.add_argument("--mode", choices=("jaccard", "directional"))

    p = sub.add_parser("select", help="apply a sample-selection strategy")
    _add_config_arg(p)
    p.add_argument("--strategy", choices=("full", "sim", "div", "div_sim"))
    p.add_argument("--keep-fraction", type=float, dest="keep_fraction")
    p.add_argument("--task-file", type=Path, dest="task_file")

    p = sub.add_parser("augment-vocab", help="add top frequent tokens to a base vocabulary")
    _add_config_arg(p)
    p.add_argument("--base-vocab", type=Path, dest="base_vocab")
    p.add_argument("--k", type=int, help="number of tokens to add")

    p = sub.add_parser("split", help="train/validation split and MLM dataset export")
    _add_config_arg(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument("--input", choices=("selected", "corpus"), dest="split_input")

    p = sub.add_parser("mask-preview", help="show original/masked/label alignment")
    p.add_argument("--text", help="text to mask (default: read one line from stdin)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mask-probability", type=float, default=0.15)
    p.add_argument("--max-tokens", type=int, default=32)

    p = sub.add_parser("pairs", help="build claim [SEP] evidence fact-checking pairs")
    p.add_argument("--input", type=Path, required=True, help="JSONL of {claim, evidence, label}")
    p.add_argument("--out", type=Path, help="output JSONL (default: stdout)")

    p = sub.add_parser("aggregate", help="aggregate run results into mean/std report")
    p.add_argument("--runs", action="append", required=True, metavar="[LABEL=]PATH",
                   help="RunResult JSONL, optionally labeled; repeatable")
    p.add_argument("--out", type=Path, help="write the aggregate report JSON here")

    p = sub.add_parser("improvements", help="error-rate and loss reduction arithmetic")
    p.add_argument("--baseline-loss", type=float)
    p.add_argument("--model-loss", type=float)
    p.add_argument("--baseline-f1", type=float)
    p.add_argument("--model-f1", type=float)

    p = sub.add_parser("carbon", help="emissions and climate-performance model card")
    p.add_argument("--power-kw", type=float, required=True)
    p.add_argument("--final-hours", type=float, required=True)
    p.add_argument("--total-hours", type=float, required=True)
    p.add_argument("--grid-intensity", type=float, required=True,
                   help="gCO2eq per kWh at the compute location")
    p.add_argument("--location", default="unknown")
    p.add_argument("--available", choices=("yes", "no"), default="yes")
    p.add_argument("--inference-mg", type=float, help="reported per-sample inference CO2eq (mg)")
    p.add_argument("--out", type=Path, help="write the card JSON here")

    p = sub.add_parser("pipeline", help="run every configured stage in order")
    _add_config_arg(p)

    return parser


def _cmd_ingest(args) -> int:
    _print_json(stages.stage_ingest(_resolve_config(args)))
    return 0


def _cmd_stats(args) -> int:
    cfg = _resolve_config(args)
    obj = stages.stage_stats(cfg, corpus_path=args.corpus)
    if args.table:
        from .corpus import render_stats_table, stats_from_json

        print(render_stats_table(stats_from_json(obj)))
    else:
        _print_json(obj)
    return 0


def _cmd_overlap(args) -> int:
    cfg = _resolve_config(args)
    _print_json(stages.stage_overlap(cfg, args.a, args.b, args.a_kind, args.b_kind))
    return 0


def _cmd_select(args) -> int:
    _print_json(stages.stage_select(_resolve_config(args)))
    return 0


def _cmd_augment(args) -> int:
    result = stages.stage_augment(_resolve_config(args))
    _print_json({"base_size": result["base_size"], "added_count": len(result["added"]),
                 "final_size": result["final_size"]})
    return 0


def _cmd_split(args) -> int:
    _print_json(stages.stage_split(_resolve_config(args)))
    return 0


def _cmd_mask_preview(args) -> int:
    text = args.text if args.text is not None else sys.stdin.readline()
    tokens = tokenize_words(text)[: args.max_tokens]
    if not tokens:
        raise DataError("no tokens to mask")
    vocab: dict[str, int] = {}
    for tok in tokens:
        vocab.setdefault(tok, len(vocab))
    mask_id = len(vocab)
    cfg = MaskingConfig(
        mask_token_id=mask_id,
        vocab_size=len(vocab) + 1,
        seed=args.seed,
        mask_probability=args.mask_probability,
    )
    batch = mask_tokens([vocab[t] for t in tokens], cfg)
    id_to_token = {i: t for t, i in vocab.items()}
    id_to_token[mask_id] = "[MASK]"
    print(render_mask_preview(tokens, batch, id_to_token))
    return 0


def _cmd_pairs(args) -> int:
    if not args.input.exists():
        raise DataError(f"input file not found: {args.input}")
    records = []
    with open(args.input, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                records.append(json.loads(raw))
            except json.JSONDecodeError as exc:
                raise DataError(f"{args.input}:{line_no}: invalid JSON: {exc.msg}") from exc
    pairs = evalkit.build_fact_pairs(records)
    lines = [
        json.dumps({"task": p.task.value, "text": p.text, "label": p.label}, ensure_ascii=False)
        for p in pairs
    ]
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        _print_json({"input_records": len(records), "pairs": len(pairs), "out": str(args.out)})
    else:
        for line in lines:
            print(line)
    return 0


def _cmd_aggregate(args) -> int:
    rows = []
    report = {}
    for entry in args.runs:
        label, sep, path = entry.partition("=")
        if not sep:
            label, path = Path(entry).stem, entry
        runs = evalkit.read_run_results(path)
        agg = evalkit.aggregate_runs(runs)
        rows.append((label, agg))
        report[label] = evalkit.aggregate_to_json(agg)
    print(evalkit.render_aggregate_table(rows))
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_improvements(args) -> int:
    have_loss = args.baseline_loss is not None and args.model_loss is not None
    have_f1 = args.baseline_f1 is not None and args.model_f1 is not None
    if not have_loss and not have_f1:
        raise UsageError(
            "provide --baseline-loss/--model-loss and/or --baseline-f1/--model-f1"
        )
    result = {}
    if have_loss:
        result["loss_reduction_percent"] = evalkit.relative_loss_reduction(
            args.baseline_loss, args.model_loss
        )
    if have_f1:
        result["error_rate_reduction_percent"] = evalkit.error_rate_reduction(
            args.baseline_f1, args.model_f1
        )
    _print_json(result)
    return 0


def _cmd_carbon(args) -> int:
    card = carbon_mod.model_card_from_mapping(
        {
            "publicly_available": args.available == "yes",
            "final_train_hours": args.final_hours,
            "total_hours": args.total_hours,
            "power_kw": args.power_kw,
            "location": args.location,
            "grid_intensity_g_per_kwh": args.grid_intensity,
            "inference_co2_mg_per_sample": args.inference_mg,
        }
    )
    print(carbon_mod.render_model_card(card))
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        carbon_mod.write_model_card(card, args.out)
    return 0


def _cmd_pipeline(args) -> int:
    _print_json(stages.run_pipeline(_resolve_config(args)))
    return 0


_HANDLERS = {
    "ingest": _cmd_ingest,
    "stats": _cmd_stats,
    "overlap": _cmd_overlap,
    "select": _cmd_select,
    "augment-vocab": _cmd_augment,
    "split": _cmd_split,
    "mask-preview": _cmd_mask_preview,
    "pairs": _cmd_pairs,
    "aggregate": _cmd_aggregate,
    "improvements": _cmd_improvements,
    "carbon": _cmd_carbon,
    "pipeline": _cmd_pipeline,
}


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(
        json.dumps({"error": {"type": kind, "message": message}}, ensure_ascii=False) + "\n"
    )


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return 1
    except DataError as exc:
        _emit_error("data", str(exc))
        return 2
    except DomforgeError as exc:
        _emit_error("data", str(exc))
        return 2
    except OSError as exc:
        _emit_error("data", str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
