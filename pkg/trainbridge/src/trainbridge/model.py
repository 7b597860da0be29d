"""Tiny transformer encoder with MLM and classification heads.

A small encoder sized for pipeline-integrity runs: learned token + position
embeddings into a few transformer layers. For classification, the final-layer
representation of the leading sequence token feeds one feedforward layer with
a tanh nonlinearity and a task-sized output projection.
"""

from __future__ import annotations

import torch
from torch import nn

from .config import ModelSettings


class Encoder(nn.Module):
    def __init__(self, vocab_size: int, cfg: ModelSettings, pad_id: int = 0):
        super().__init__()
        self.cfg = cfg
        self.pad_id = pad_id
        self.tok_emb = nn.Embedding(vocab_size, cfg.hidden_size, padding_idx=pad_id)
        self.pos_emb = nn.Embedding(cfg.max_seq_len, cfg.hidden_size)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.hidden_size,
            nhead=cfg.num_heads,
            dim_feedforward=cfg.ffn_size,
            dropout=cfg.dropout,
            activation="gelu",
            batch_first=True,
        )
        self.layers = nn.TransformerEncoder(layer, cfg.num_layers)
        self.norm = nn.LayerNorm(cfg.hidden_size)

    @property
    def vocab_size(self) -> int:
        return self.tok_emb.num_embeddings

    def forward(self, input_ids: torch.Tensor) -> torch.Tensor:
        pad_mask = input_ids == self.pad_id
        positions = torch.arange(input_ids.size(1), device=input_ids.device)
        hidden = self.tok_emb(input_ids) + self.pos_emb(positions)[None, :, :]
        hidden = self.layers(hidden, src_key_padding_mask=pad_mask)
        return self.norm(hidden)


class MaskedLM(nn.Module):
    def __init__(self, vocab_size: int, cfg: ModelSettings, pad_id: int = 0):
        super().__init__()
        self.encoder = Encoder(vocab_size, cfg, pad_id)
        self.lm_head = nn.Linear(cfg.hidden_size, vocab_size)

    def forward(self, input_ids: torch.Tensor) -> torch.Tensor:
        return self.lm_head(self.encoder(input_ids))

    @torch.no_grad()
    def resize_vocab(self, new_size: int, noise_std: float = 0.02,
                     generator: torch.Generator | None = None) -> int:
        """Grow the embedding and LM head by (new_size - current) rows.

        New rows start at the mean of the existing embeddings plus small noise.
        """
        old = self.encoder.vocab_size
        grow = new_size - old
        if grow < 0:
            raise ValueError(f"cannot shrink vocabulary from {old} to {new_size}")
        if grow == 0:
            return 0
        hidden = self.encoder.cfg.hidden_size

        def grown(weight: torch.Tensor) -> torch.Tensor:
            mean = weight.mean(dim=0, keepdim=True)
            noise = torch.randn(grow, weight.size(1), generator=generator) * noise_std
            return torch.cat([weight, mean + noise], dim=0)

        new_emb = nn.Embedding(new_size, hidden, padding_idx=self.encoder.pad_id)
        new_emb.weight.data.copy_(grown(self.encoder.tok_emb.weight.data))
        self.encoder.tok_emb = new_emb

        new_head = nn.Linear(hidden, new_size)
        new_head.weight.data.copy_(grown(self.lm_head.weight.data))
        bias = torch.zeros(new_size)
        bias[:old] = self.lm_head.bias.data
        new_head.bias.data.copy_(bias)
        self.lm_head = new_head
        return grow


class SequenceClassifier(nn.Module):
    """Leading-token representation -> dense + tanh -> output projection."""

    def __init__(self, encoder: Encoder, num_classes: int):
        super().__init__()
        self.encoder = encoder
        hidden = encoder.cfg.hidden_size
        self.dense = nn.Linear(hidden, hidden)
        self.activation = nn.Tanh()
        self.dropout = nn.Dropout(encoder.cfg.dropout)
        self.out_proj = nn.Linear(hidden, num_classes)

    @property
    def num_classes(self) -> int:
        return self.out_proj.out_features

    def forward(self, input_ids: torch.Tensor) -> torch.Tensor:
        cls = self.encoder(input_ids)[:, 0, :]
        return self.out_proj(self.dropout(self.activation(self.dense(cls))))
