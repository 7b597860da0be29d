"""trainbridge: toy-scale continued pretraining and fine-tuning over corpus artifacts.

Consumes the corpus tooling's exported files (MLM dataset directory with its
manifest, base vocabulary, added-token list, downstream task JSONL) and emits
checkpoints, loss logs and RunResult JSONL for the evaluation aggregator.
"""

from .config import (
    DownstreamSettings,
    ModelSettings,
    OptimizerSettings,
    PretrainSettings,
    TrainConfig,
)
from .errors import ArtifactError, BridgeError
from .finetune import finetune_eval, load_checkpoint
from .model import Encoder, MaskedLM, SequenceClassifier
from .pretrain import continued_pretrain
from .vocab import WordVocab

__version__ = "0.1.0"

__all__ = [
    "ArtifactError",
    "BridgeError",
    "DownstreamSettings",
    "Encoder",
    "MaskedLM",
    "ModelSettings",
    "OptimizerSettings",
    "PretrainSettings",
    "SequenceClassifier",
    "TrainConfig",
    "WordVocab",
    "continued_pretrain",
    "finetune_eval",
    "load_checkpoint",
]
