"""Downstream-task schemas, fact-checking pair construction, metrics and run aggregation.

Covers the three downstream tasks (binary topic classification, three-way
sentiment, claim/evidence fact-checking), the weighted-F1 and cross-entropy
metrics used to score them, the repeated-run aggregation protocol, and the
relative improvement arithmetic used when comparing models.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)

SEP_TOKEN = "[SEP]"


class Task(str, Enum):
    TEXT_CLASSIFICATION = "text_classification"
    SENTIMENT = "sentiment"
    FACT_CHECKING = "fact_checking"


TASK_LABELS: dict[Task, tuple[str, ...]] = {
    Task.TEXT_CLASSIFICATION: ("yes", "no"),
    Task.SENTIMENT: ("opportunity", "neutral", "risk"),
    Task.FACT_CHECKING: ("SUPPORTS", "REFUTES", "NOT_ENOUGH_INFO"),
}

# normalization map for the fact-checking label spelling variants
_FACT_LABEL_ALIASES = {
    "SUPPORTS": "SUPPORTS",
    "SUPPORT": "SUPPORTS",
    "SUPPORTED": "SUPPORTS",
    "REFUTES": "REFUTES",
    "REFUTE": "REFUTES",
    "REFUTED": "REFUTES",
    "NOT_ENOUGH_INFO": "NOT_ENOUGH_INFO",
    "NOT ENOUGH INFO": "NOT_ENOUGH_INFO",
    "NEI": "NOT_ENOUGH_INFO",
}


def canonicalize_fact_label(raw: str) -> str:
    label = _FACT_LABEL_ALIASES.get(str(raw).strip().upper())
    if label is None:
        raise DataError(f"unknown fact-checking label: {raw!r}")
    return label


@dataclass(frozen=True)
class DownstreamExample:
    task: Task
    text: str
    label: str

    def __post_init__(self) -> None:
        if not isinstance(self.task, Task):
            object.__setattr__(self, "task", Task(self.task))
        if self.task is Task.FACT_CHECKING:
            object.__setattr__(self, "label", canonicalize_fact_label(self.label))
        if self.label not in TASK_LABELS[self.task]:
            raise DataError(
                f"label {self.label!r} is not legal for task {self.task.value!r}"
            )


def build_fact_pairs(records: Iterable[Mapping]) -> list[DownstreamExample]:
    """Concatenate claims with evidence ("claim [SEP] evidence"), dropping
    records labeled NOT_ENOUGH_INFO. Unknown labels name the offending record."""
    pairs: list[DownstreamExample] = []
    for idx, rec in enumerate(records):
        claim = rec.get("claim")
        evidence = rec.get("evidence")
        if not isinstance(claim, str) or not isinstance(evidence, str):
            raise DataError(f"record {idx}: 'claim' and 'evidence' must be strings")
        try:
            label = canonicalize_fact_label(rec.get("label"))
        except DataError as exc:
            snippet = claim[:60]
            raise DataError(f"record {idx} ({snippet!r}): {exc}") from None
        if label == "NOT_ENOUGH_INFO":
            continue
        pairs.append(
            DownstreamExample(
                Task.FACT_CHECKING, f"{claim} {SEP_TOKEN} {evidence}", label
            )
        )
    return pairs


def weighted_f1(y_true: Sequence, y_pred: Sequence) -> float:
    """Support-weighted mean of per-class F1 scores.

    Classes absent from y_true carry zero weight; a per-class F1 with a zero
    denominator is defined as 0.
    """
    if len(y_true) != len(y_pred):
        raise DataError(f"length mismatch: {len(y_true)} vs {len(y_pred)}")
    if len(y_true) == 0:
        raise DataError("weighted_f1 requires at least one example")
    classes = sorted(set(y_true), key=str)
    n = len(y_true)
    score = 0.0
    for cls in classes:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p == cls)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != cls and p == cls)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == cls and p != cls)
        support = tp + fn
        denom = 2 * tp + fp + fn
        f1 = (2 * tp / denom) if denom else 0.0
        score += (support / n) * f1
    return score


def cross_entropy(
    probabilities: Sequence[Sequence[float]],
    y_true: Sequence[int],
    clamp_epsilon: float | None = 1e-12,
) -> float:
    """Mean negative natural log-probability of the true class.

    Zero probability at the true class raises if ``clamp_epsilon`` is None,
    otherwise the value is clamped and a warning is logged.
    """
    if len(probabilities) != len(y_true):
        raise DataError(f"length mismatch: {len(probabilities)} vs {len(y_true)}")
    if len(y_true) == 0:
        raise DataError("cross_entropy requires at least one example")
    losses: list[float] = []
    clamped = 0
    for i, (vec, label) in enumerate(zip(probabilities, y_true)):
        arr = np.asarray(vec, dtype=np.float64)
        if abs(float(arr.sum()) - 1.0) > 1e-6:
            raise DataError(f"example {i}: probabilities sum to {float(arr.sum())}")
        if not (0 <= label < arr.size):
            raise DataError(f"example {i}: label {label} out of range")
        p = float(arr[label])
        if clamp_epsilon is None:
            if p <= 0.0:
                raise DataError(f"example {i}: zero probability at the true class")
        elif p < clamp_epsilon:
            p = clamp_epsilon
            clamped += 1
        losses.append(-math.log(p))
    if clamped:
        logger.warning("cross_entropy clamped %d probabilit(ies) to epsilon", clamped)
    return math.fsum(losses) / len(losses)


@dataclass(frozen=True)
class RunResult:
    """One repeated-evaluation run (index within the 60-run protocol)."""

    run_index: int
    val_loss: float
    weighted_f1: float

    def __post_init__(self) -> None:
        if not (1 <= self.run_index <= 60):
            raise DataError(f"run_index must be in [1, 60], got {self.run_index}")
        if not math.isfinite(self.val_loss) or self.val_loss < 0:
            raise DataError(f"val_loss must be finite and non-negative, got {self.val_loss}")
        if not math.isfinite(self.weighted_f1) or not (0.0 <= self.weighted_f1 <= 1.0):
            raise DataError(f"weighted_f1 must be in [0, 1], got {self.weighted_f1}")


@dataclass(frozen=True)
class AggregateResult:
    mean_loss: float
    std_loss: float
    mean_f1: float
    std_f1: float
    n_runs: int


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def aggregate_runs(runs: Sequence[RunResult]) -> AggregateResult:
    """Mean and sample standard deviation of loss and weighted F1."""
    if not runs:
        raise DataError("no runs to aggregate")
    mean_loss, std_loss = _mean_std([r.val_loss for r in runs])
    mean_f1, std_f1 = _mean_std([r.weighted_f1 for r in runs])
    return AggregateResult(mean_loss, std_loss, mean_f1, std_f1, len(runs))


def format_mean_std(mean: float, std: float, digits: int = 3) -> str:
    """Render as mean with the standard deviation subscripted, e.g. 0.748₍0.036₎."""
    return f"{mean:.{digits}f}₍{std:.{digits}f}₎"


def aggregate_to_json(agg: AggregateResult) -> dict:
    return {
        "n_runs": agg.n_runs,
        "mean_loss": agg.mean_loss,
        "std_loss": agg.std_loss,
        "mean_f1": agg.mean_f1,
        "std_f1": agg.std_f1,
        "loss": format_mean_std(agg.mean_loss, agg.std_loss),
        "f1": format_mean_std(agg.mean_f1, agg.std_f1),
    }


def render_aggregate_table(rows: Sequence[tuple[str, AggregateResult]]) -> str:
    """Text table with one row per model: mean loss and F1 with std subscripts."""
    cells = [("Model", "Loss", "F1")]
    for label, agg in rows:
        cells.append(
            (
                label,
                format_mean_std(agg.mean_loss, agg.std_loss),
                format_mean_std(agg.mean_f1, agg.std_f1),
            )
        )
    widths = [max(len(r[i]) for r in cells) for i in range(3)]
    lines = []
    for idx, row in enumerate(cells):
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("-" * (sum(widths) + 4))
    return "\n".join(lines)


def error_rate_reduction(baseline_f1: float, model_f1: float) -> float:
    """Relative shrinkage of (1 - F1) between a baseline and a model, in percent."""
    if baseline_f1 >= 1.0:
        raise DataError("zero baseline error")
    return ((1.0 - baseline_f1) - (1.0 - model_f1)) / (1.0 - baseline_f1) * 100.0


def relative_loss_reduction(baseline_loss: float, model_loss: float) -> float:
    """Relative loss decrease between a baseline and a model, in percent."""
    if baseline_loss <= 0.0:
        raise DataError("baseline loss must be positive")
    return (baseline_loss - model_loss) / baseline_loss * 100.0


def split_for_run(
    n_examples: int, run_index: int, train_fraction: float = 0.9
) -> tuple[list[int], list[int]]:
    """Seeded train/validation index split for the repeated-run protocol.

    The generator is keyed by run_index alone so run k is reproducible in
    isolation.
    """
    if n_examples < 2:
        raise DataError(f"need at least 2 examples, got {n_examples}")
    from fractions import Fraction

    rng = np.random.Generator(np.random.Philox(key=run_index))
    perm = rng.permutation(n_examples)
    take = int(round(Fraction(str(train_fraction)) * n_examples))
    train = sorted(int(i) for i in perm[:take])
    val = sorted(int(i) for i in perm[take:])
    return train, val


def read_run_results(path: str | Path) -> list[RunResult]:
    """Read the RunResult interchange JSONL written by the training bridge."""
    runs: list[RunResult] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
                runs.append(
                    RunResult(
                        int(obj["run_index"]),
                        float(obj["val_loss"]),
                        float(obj["weighted_f1"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{line_no}: invalid run result: {exc}") from exc
    return runs


def write_run_results(runs: Iterable[RunResult], out: IO | str | Path) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_run_results(runs, fh)
        return
    for r in runs:
        out.write(
            json.dumps(
                {
                    "run_index": r.run_index,
                    "val_loss": r.val_loss,
                    "weighted_f1": r.weighted_f1,
                }
            )
            + "\n"
        )


def read_downstream_jsonl(path: str | Path) -> list[DownstreamExample]:
    """Read {task, text, label} JSONL (or {task, claim, evidence, label} rows)."""
    examples: list[DownstreamExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{line_no}: invalid JSON: {exc.msg}") from exc
            try:
                task = Task(obj["task"])
                if "text" in obj:
                    text = obj["text"]
                else:
                    text = f"{obj['claim']} {SEP_TOKEN} {obj['evidence']}"
                examples.append(DownstreamExample(task, text, obj["label"]))
            except (KeyError, ValueError) as exc:
                raise DataError(f"{path}:{line_no}: invalid example: {exc}") from exc
    return examples
