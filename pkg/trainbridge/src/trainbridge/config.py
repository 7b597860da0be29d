"""Training configuration.

Full-scale defaults: pretraining batch 2016 (reached through gradient
accumulation), lr 5e-4, 12 epochs; downstream batch 32, lr 5e-5, up to 1000
epochs with patience 4, balanced class weights and a single tanh feedforward
layer; Adam with epsilon 1e-6, betas (0.9, 0.999), warmup-linear schedule and
weight decay 0.01. Toy-scale model dimensions and step caps are separate
knobs; whatever deviates from the defaults is reported by ``overrides()`` and
logged in the output metadata.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields


@dataclass
class ModelSettings:
    """Toy stand-in encoder dimensions (a 4-layer, 128-wide transformer)."""

    hidden_size: int = 128
    num_layers: int = 4
    num_heads: int = 4
    ffn_size: int = 256
    max_seq_len: int = 128
    dropout: float = 0.1


@dataclass
class PretrainSettings:
    batch_size: int = 2016  # effective; reached via gradient accumulation
    micro_batch_size: int = 16
    learning_rate: float = 5e-4
    epochs: int = 12
    mask_probability: float = 0.15


@dataclass
class DownstreamSettings:
    batch_size: int = 32
    learning_rate: float = 5e-5
    max_epochs: int = 1000
    patience: int = 4
    class_weight: str = "balanced"
    ff_nonlinearity: str = "tanh"
    ff_layers: int = 1


@dataclass
class OptimizerSettings:
    adam_epsilon: float = 1e-6
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    scheduler: str = "warmup-linear"
    warmup_fraction: float = 0.1
    weight_decay: float = 0.01


@dataclass
class TrainConfig:
    model: ModelSettings = field(default_factory=ModelSettings)
    pretrain: PretrainSettings = field(default_factory=PretrainSettings)
    downstream: DownstreamSettings = field(default_factory=DownstreamSettings)
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    max_steps: int | None = 500  # toy-scale cap per training phase; None = uncapped
    seed: int = 0
    device: str = "cpu"

    def to_dict(self) -> dict:
        return asdict(self)

    def overrides(self) -> dict:
        """Flat {section.field: value} map of everything differing from defaults."""
        default = TrainConfig()
        diff: dict[str, object] = {}
        for f in fields(self):
            ours, theirs = getattr(self, f.name), getattr(default, f.name)
            if hasattr(ours, "__dataclass_fields__"):
                for sub in fields(ours):
                    a, b = getattr(ours, sub.name), getattr(theirs, sub.name)
                    if a != b:
                        diff[f"{f.name}.{sub.name}"] = a
            elif ours != theirs:
                diff[f.name] = ours
        return diff

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        def build(klass, payload):
            allowed = {f.name for f in fields(klass)}
            unknown = set(payload) - allowed
            if unknown:
                raise ValueError(f"unknown {klass.__name__} field(s): {sorted(unknown)}")
            return klass(**payload)

        return cls(
            model=build(ModelSettings, data.get("model", {})),
            pretrain=build(PretrainSettings, data.get("pretrain", {})),
            downstream=build(DownstreamSettings, data.get("downstream", {})),
            optimizer=build(OptimizerSettings, data.get("optimizer", {})),
            max_steps=data.get("max_steps", 500),
            seed=data.get("seed", 0),
            device=data.get("device", "cpu"),
        )
