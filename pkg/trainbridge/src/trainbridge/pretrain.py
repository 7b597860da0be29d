"""Continued masked-language-model pretraining over exported corpus artifacts."""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path

import torch
from torch import nn

from .config import TrainConfig
from .data import load_added_tokens, load_mlm_dataset
from .model import MaskedLM
from .train_utils import (
    IGNORE_INDEX,
    build_optimizer,
    iter_batches,
    mlm_mask,
    pad_batch,
    warmup_linear_schedule,
)
from .vocab import WordVocab

logger = logging.getLogger(__name__)

EVAL_MASK_SEED = 1_000_003  # fixed so per-epoch validation losses are comparable


def _encode_rows(rows, vocab: WordVocab, max_len: int) -> list[list[int]]:
    return [vocab.encode(r.text, max_len) for r in rows]


@torch.no_grad()
def _validation_loss(model: MaskedLM, sequences, vocab, cfg: TrainConfig) -> float:
    model.eval()
    loss_fn = nn.CrossEntropyLoss(ignore_index=IGNORE_INDEX, reduction="sum")
    total_loss, total_predictions = 0.0, 0
    for idx in iter_batches(len(sequences), cfg.pretrain.micro_batch_size):
        batch = pad_batch([sequences[i] for i in idx], vocab.pad_id)
        gen = torch.Generator().manual_seed(EVAL_MASK_SEED)
        corrupted, labels = mlm_mask(batch, vocab, cfg.pretrain.mask_probability, gen)
        logits = model(corrupted.to(cfg.device))
        total_loss += float(
            loss_fn(logits.view(-1, logits.size(-1)), labels.view(-1).to(cfg.device))
        )
        total_predictions += int((labels != IGNORE_INDEX).sum())
    model.train()
    return total_loss / max(1, total_predictions)


def continued_pretrain(
    mlm_dir: str | Path,
    base_vocab_path: str | Path,
    added_tokens_path: str | Path | None,
    config: TrainConfig,
    out_dir: str | Path,
) -> dict:
    """Train the MLM on verified artifacts; writes a checkpoint and a loss log.

    Returns the loss log: initial validation loss, per-epoch validation losses,
    the config, and any overrides relative to the full-scale defaults.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = load_mlm_dataset(mlm_dir)
    added = load_added_tokens(added_tokens_path)

    torch.manual_seed(config.seed)
    vocab = WordVocab.from_base_file(base_vocab_path)
    base_size = len(vocab)
    model = MaskedLM(base_size, config.model, pad_id=vocab.pad_id)

    grown = vocab.extend(added, strict=True)
    resize_gen = torch.Generator().manual_seed(config.seed + 1)
    model.resize_vocab(len(vocab), generator=resize_gen)
    model.to(config.device)
    logger.info("vocabulary %d -> %d (+%d added tokens)", base_size, len(vocab), grown)

    max_len = config.model.max_seq_len
    train_seqs = _encode_rows(dataset.train, vocab, max_len)
    val_seqs = _encode_rows(dataset.val, vocab, max_len)

    micro = config.pretrain.micro_batch_size
    accum = max(1, math.ceil(config.pretrain.batch_size / micro))
    steps_per_epoch = max(1, math.ceil(len(train_seqs) / micro / accum))
    planned_steps = steps_per_epoch * config.pretrain.epochs
    if config.max_steps is not None:
        planned_steps = min(planned_steps, config.max_steps)

    optimizer = build_optimizer(model, config.pretrain.learning_rate, config.optimizer)
    scheduler = warmup_linear_schedule(
        optimizer, planned_steps, config.optimizer.warmup_fraction
    )
    loss_fn = nn.CrossEntropyLoss(ignore_index=IGNORE_INDEX)

    initial_val_loss = _validation_loss(model, val_seqs, vocab, config)
    epoch_val_losses: list[float] = []
    data_gen = torch.Generator().manual_seed(config.seed + 2)
    mask_gen = torch.Generator().manual_seed(config.seed + 3)

    model.train()
    step = 0
    done = False
    for epoch in range(config.pretrain.epochs):
        if done:
            break
        micro_index = 0
        optimizer.zero_grad()
        for idx in iter_batches(len(train_seqs), micro, generator=data_gen):
            batch = pad_batch([train_seqs[i] for i in idx], vocab.pad_id)
            corrupted, labels = mlm_mask(
                batch, vocab, config.pretrain.mask_probability, mask_gen
            )
            logits = model(corrupted.to(config.device))
            loss = loss_fn(
                logits.view(-1, logits.size(-1)), labels.view(-1).to(config.device)
            )
            (loss / accum).backward()
            micro_index += 1
            if micro_index % accum == 0:
                optimizer.step()
                scheduler.step()
                optimizer.zero_grad()
                step += 1
                if config.max_steps is not None and step >= config.max_steps:
                    done = True
                    break
        if micro_index % accum != 0 and not done:
            optimizer.step()
            scheduler.step()
            optimizer.zero_grad()
            step += 1
            if config.max_steps is not None and step >= config.max_steps:
                done = True
        val_loss = _validation_loss(model, val_seqs, vocab, config)
        epoch_val_losses.append(val_loss)
        logger.info("epoch %d: val MLM loss %.4f", epoch + 1, val_loss)

    vocab.save(out_dir / "vocab.txt")
    torch.save(
        {
            "model_state": model.state_dict(),
            "vocab_size": len(vocab),
            "model_settings": config.model.__dict__,
            "pad_id": vocab.pad_id,
        },
        out_dir / "model.pt",
    )
    loss_log = {
        "initial_val_loss": initial_val_loss,
        "epoch_val_losses": epoch_val_losses,
        "optimizer_steps": step,
        "added_tokens": grown,
        "vocab_size": len(vocab),
        "config": config.to_dict(),
        "overrides": config.overrides(),
    }
    with open(out_dir / "loss_log.json", "w", encoding="utf-8") as fh:
        json.dump(loss_log, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return loss_log
