"""Command-line entry point: `trainbridge pretrain` and `trainbridge finetune`."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import TrainConfig
from .errors import BridgeError
from .finetune import finetune_eval
from .pretrain import continued_pretrain


def _load_config(path: str | None, overrides: dict) -> TrainConfig:
    data = {}
    if path:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    config = TrainConfig.from_dict(data)
    for dotted, value in overrides.items():
        if value is None:
            continue
        section, _, name = dotted.partition(".")
        if name:
            setattr(getattr(config, section), name, value)
        else:
            setattr(config, section, value)
    return config


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(prog="trainbridge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pretrain", help="continued MLM pretraining on exported artifacts")
    p.add_argument("--mlm-dir", required=True, help="directory with train/val/manifest")
    p.add_argument("--base-vocab", required=True)
    p.add_argument("--added-tokens", help="rank-ordered added-token file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config", help="TrainConfig JSON")
    p.add_argument("--epochs", type=int)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("finetune", help="repeated fine-tuning runs on a task dataset")
    p.add_argument("--task", required=True, help="downstream task JSONL")
    p.add_argument("--checkpoint", required=True, help="pretraining output directory")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n-runs", type=int, default=60)
    p.add_argument("--config", help="TrainConfig JSON")
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--max-steps", type=int)

    args = parser.parse_args(argv)
    try:
        if args.command == "pretrain":
            config = _load_config(
                args.config,
                {
                    "pretrain.epochs": args.epochs,
                    "max_steps": args.max_steps,
                    "seed": args.seed,
                },
            )
            log = continued_pretrain(
                args.mlm_dir, args.base_vocab, args.added_tokens, config, args.out_dir
            )
            print(json.dumps(
                {
                    "initial_val_loss": log["initial_val_loss"],
                    "final_val_loss": log["epoch_val_losses"][-1] if log["epoch_val_losses"] else None,
                    "out_dir": args.out_dir,
                },
                indent=2,
            ))
        else:
            config = _load_config(
                args.config,
                {"downstream.max_epochs": args.max_epochs, "max_steps": args.max_steps},
            )
            results = finetune_eval(
                args.task, args.checkpoint, config, args.n_runs, args.out_dir
            )
            print(json.dumps({"n_runs": len(results), "out_dir": args.out_dir}, indent=2))
        return 0
    except BridgeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
