"""Shared training plumbing: batching, MLM masking, optimizer and schedule."""

from __future__ import annotations

import math

import torch
from torch import nn

from .config import OptimizerSettings
from .vocab import WordVocab

IGNORE_INDEX = -100


def pad_batch(sequences: list[list[int]], pad_id: int) -> torch.Tensor:
    width = max(len(s) for s in sequences)
    out = torch.full((len(sequences), width), pad_id, dtype=torch.long)
    for i, seq in enumerate(sequences):
        out[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
    return out


def iter_batches(n: int, batch_size: int, generator: torch.Generator | None = None):
    """Yield index tensors; shuffled when a generator is given."""
    order = (
        torch.randperm(n, generator=generator)
        if generator is not None
        else torch.arange(n)
    )
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def mlm_mask(
    input_ids: torch.Tensor,
    vocab: WordVocab,
    mask_probability: float,
    generator: torch.Generator,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Standard MLM corruption: select positions, then 80/10/10 mask/random/keep."""
    labels = input_ids.clone()
    special = torch.zeros_like(input_ids, dtype=torch.bool)
    for sid in vocab.special_ids:
        special |= input_ids == sid
    probs = torch.full(input_ids.shape, mask_probability)
    probs.masked_fill_(special, 0.0)
    selected = torch.bernoulli(probs, generator=generator).bool()
    labels[~selected] = IGNORE_INDEX

    corrupted = input_ids.clone()
    to_mask = (
        torch.bernoulli(torch.full(input_ids.shape, 0.8), generator=generator).bool()
        & selected
    )
    corrupted[to_mask] = vocab.mask_id
    to_random = (
        torch.bernoulli(torch.full(input_ids.shape, 0.5), generator=generator).bool()
        & selected
        & ~to_mask
    )
    random_ids = torch.randint(
        len(vocab), input_ids.shape, dtype=torch.long, generator=generator
    )
    corrupted[to_random] = random_ids[to_random]
    return corrupted, labels


def build_optimizer(model: nn.Module, lr: float, opt: OptimizerSettings):
    return torch.optim.AdamW(
        model.parameters(),
        lr=lr,
        betas=(opt.adam_beta1, opt.adam_beta2),
        eps=opt.adam_epsilon,
        weight_decay=opt.weight_decay,
    )


def warmup_linear_schedule(optimizer, total_steps: int, warmup_fraction: float):
    """Linear warmup to the base lr, then linear decay to zero."""
    warmup = max(1, int(math.ceil(total_steps * warmup_fraction)))

    def factor(step: int) -> float:
        if step < warmup:
            return (step + 1) / warmup
        remaining = max(1, total_steps - warmup)
        return max(0.0, (total_steps - step) / remaining)

    return torch.optim.lr_scheduler.LambdaLR(optimizer, factor)
