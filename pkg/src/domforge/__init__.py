"""domforge: corpus curation and evaluation toolkit for domain-adaptive pretraining.

Subpackages cover corpus ingestion and statistics, word-level vocabulary
tooling and augmentation, sample-selection strategies, MLM data preparation,
downstream evaluation aggregation, and training carbon accounting. The
``domforge`` CLI wires them into a reproducible pipeline.
"""

from .carbon import CarbonParams, ModelCard, co2_emissions, render_model_card
from .corpus import (
    Corpus,
    CorpusStats,
    Paragraph,
    Source,
    corpus_stats,
    dedupe,
    ingest_jsonl,
    word_count,
)
from .errors import DataError, DomforgeError, UsageError
from .evalkit import (
    AggregateResult,
    DownstreamExample,
    RunResult,
    Task,
    aggregate_runs,
    build_fact_pairs,
    cross_entropy,
    error_rate_reduction,
    relative_loss_reduction,
    weighted_f1,
)
from .mlm import MaskedBatch, MaskingConfig, SplitSpec, mask_tokens, split_train_val
from .selection import (
    SelectionResult,
    SelectionStrategy,
    StrategyKind,
    TaskReference,
    diversity_score,
    minmax_scale,
    paragraph_distribution,
    select,
    similarity_score,
)
from .vocab import (
    AugmentedVocab,
    FrequencyTable,
    VocabSet,
    augment_vocabulary,
    term_frequencies,
    tokenize_words,
    top_n_vocabulary,
    vocabulary_overlap,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateResult",
    "AugmentedVocab",
    "CarbonParams",
    "Corpus",
    "CorpusStats",
    "DataError",
    "DomforgeError",
    "DownstreamExample",
    "FrequencyTable",
    "MaskedBatch",
    "MaskingConfig",
    "ModelCard",
    "Paragraph",
    "RunResult",
    "SelectionResult",
    "SelectionStrategy",
    "Source",
    "SplitSpec",
    "StrategyKind",
    "Task",
    "TaskReference",
    "UsageError",
    "VocabSet",
    "aggregate_runs",
    "augment_vocabulary",
    "build_fact_pairs",
    "co2_emissions",
    "corpus_stats",
    "cross_entropy",
    "dedupe",
    "diversity_score",
    "error_rate_reduction",
    "ingest_jsonl",
    "mask_tokens",
    "minmax_scale",
    "paragraph_distribution",
    "relative_loss_reduction",
    "render_model_card",
    "select",
    "similarity_score",
    "split_train_val",
    "term_frequencies",
    "tokenize_words",
    "top_n_vocabulary",
    "vocabulary_overlap",
    "weighted_f1",
    "word_count",
]
