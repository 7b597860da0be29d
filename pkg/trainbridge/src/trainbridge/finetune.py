"""Repeated downstream fine-tuning runs emitting the RunResult interchange JSONL.

Each run draws its own seeded 90/10 train/validation resample (seed equal to
the run index), trains a classification head over the pretrained encoder with
balanced class weights, stops early after `patience` epochs without validation
improvement, and reports the best epoch's validation loss and weighted F1.
"""

from __future__ import annotations

import copy
import json
import logging
import math
from pathlib import Path

import torch
from sklearn.metrics import f1_score
from torch import nn

from .config import TrainConfig
from .data import TASK_LABELS, load_task_dataset
from .errors import ArtifactError
from .model import Encoder, MaskedLM, SequenceClassifier
from .train_utils import build_optimizer, iter_batches, pad_batch, warmup_linear_schedule
from .vocab import WordVocab

logger = logging.getLogger(__name__)


def load_checkpoint(checkpoint_dir: str | Path, config: TrainConfig) -> tuple[MaskedLM, WordVocab]:
    checkpoint_dir = Path(checkpoint_dir)
    model_path = checkpoint_dir / "model.pt"
    if not model_path.exists():
        raise ArtifactError(f"checkpoint not found: {model_path}")
    payload = torch.load(model_path, map_location="cpu", weights_only=True)
    vocab = WordVocab.load(checkpoint_dir / "vocab.txt")
    if len(vocab) != payload["vocab_size"]:
        raise ArtifactError("checkpoint vocabulary size does not match vocab.txt")
    from .config import ModelSettings

    settings = ModelSettings(**payload["model_settings"])
    model = MaskedLM(payload["vocab_size"], settings, pad_id=payload["pad_id"])
    model.load_state_dict(payload["model_state"])
    return model, vocab


def _balanced_class_weights(labels: list[int], num_classes: int) -> torch.Tensor:
    counts = [max(1, labels.count(c)) for c in range(num_classes)]
    total = len(labels)
    return torch.tensor(
        [total / (num_classes * c) for c in counts], dtype=torch.float32
    )


def _resample_indices(n: int, run_index: int, train_fraction: float = 0.9):
    gen = torch.Generator().manual_seed(run_index)
    perm = torch.randperm(n, generator=gen).tolist()
    take = int(round(train_fraction * n))
    return sorted(perm[:take]), sorted(perm[take:])


@torch.no_grad()
def _evaluate(model, sequences, labels, batch_size, pad_id, device):
    model.eval()
    loss_fn = nn.CrossEntropyLoss(reduction="sum")
    total, n = 0.0, 0
    predictions: list[int] = []
    for idx in iter_batches(len(sequences), batch_size):
        batch = pad_batch([sequences[i] for i in idx], pad_id).to(device)
        target = torch.tensor([labels[i] for i in idx], dtype=torch.long, device=device)
        logits = model(batch)
        total += float(loss_fn(logits, target))
        n += len(idx)
        predictions.extend(logits.argmax(dim=-1).tolist())
    model.train()
    return total / max(1, n), predictions


def _single_run(
    run_index: int,
    sequences: list[list[int]],
    label_ids: list[int],
    base_encoder: Encoder,
    num_classes: int,
    config: TrainConfig,
    pad_id: int,
) -> dict:
    torch.manual_seed(run_index)
    train_idx, val_idx = _resample_indices(len(sequences), run_index)
    train_seqs = [sequences[i] for i in train_idx]
    train_labels = [label_ids[i] for i in train_idx]
    val_seqs = [sequences[i] for i in val_idx]
    val_labels = [label_ids[i] for i in val_idx]

    model = SequenceClassifier(copy.deepcopy(base_encoder), num_classes).to(config.device)
    weights = _balanced_class_weights(train_labels, num_classes).to(config.device)
    loss_fn = nn.CrossEntropyLoss(weight=weights)

    ds = config.downstream
    steps_per_epoch = max(1, math.ceil(len(train_seqs) / ds.batch_size))
    planned = steps_per_epoch * ds.max_epochs
    if config.max_steps is not None:
        planned = min(planned, config.max_steps)
    optimizer = build_optimizer(model, ds.learning_rate, config.optimizer)
    scheduler = warmup_linear_schedule(optimizer, planned, config.optimizer.warmup_fraction)

    data_gen = torch.Generator().manual_seed(run_index)
    best_loss = float("inf")
    best_state = None
    epochs_without_improvement = 0
    step = 0
    for _epoch in range(ds.max_epochs):
        for idx in iter_batches(len(train_seqs), ds.batch_size, generator=data_gen):
            batch = pad_batch([train_seqs[i] for i in idx], pad_id).to(config.device)
            target = torch.tensor(
                [train_labels[i] for i in idx], dtype=torch.long, device=config.device
            )
            optimizer.zero_grad()
            loss = loss_fn(model(batch), target)
            loss.backward()
            optimizer.step()
            scheduler.step()
            step += 1
            if config.max_steps is not None and step >= config.max_steps:
                break
        val_loss, _ = _evaluate(
            model, val_seqs, val_labels, ds.batch_size, pad_id, config.device
        )
        if val_loss < best_loss:
            best_loss = val_loss
            best_state = copy.deepcopy(model.state_dict())
            epochs_without_improvement = 0
        else:
            epochs_without_improvement += 1
            if epochs_without_improvement >= ds.patience:
                break
        if config.max_steps is not None and step >= config.max_steps:
            break

    if best_state is not None:
        model.load_state_dict(best_state)
    val_loss, predictions = _evaluate(
        model, val_seqs, val_labels, ds.batch_size, pad_id, config.device
    )
    f1 = float(f1_score(val_labels, predictions, average="weighted", zero_division=0))
    return {"run_index": run_index, "val_loss": val_loss, "weighted_f1": f1}


def finetune_eval(
    task_path: str | Path,
    checkpoint_dir: str | Path,
    config: TrainConfig,
    n_runs: int,
    out_dir: str | Path,
) -> list[dict]:
    """Run the repeated train/eval protocol; writes runresults.jsonl + metadata."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    task, examples = load_task_dataset(task_path)
    classes = list(TASK_LABELS[task])
    label_to_id = {label: i for i, label in enumerate(classes)}

    pretrained, vocab = load_checkpoint(checkpoint_dir, config)
    sequences = [vocab.encode(ex.text, config.model.max_seq_len) for ex in examples]
    label_ids = [label_to_id[ex.label] for ex in examples]

    results = []
    for run_index in range(1, n_runs + 1):
        result = _single_run(
            run_index,
            sequences,
            label_ids,
            pretrained.encoder,
            len(classes),
            config,
            vocab.pad_id,
        )
        logger.info(
            "run %d: val loss %.4f, weighted F1 %.4f",
            run_index, result["val_loss"], result["weighted_f1"],
        )
        results.append(result)

    runs_path = out_dir / "runresults.jsonl"
    with open(runs_path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r) + "\n")
    with open(out_dir / "metadata.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "task": task,
                "classes": classes,
                "n_runs": n_runs,
                "output_neurons": len(classes),
                "config": config.to_dict(),
                "overrides": config.overrides(),
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    return results
