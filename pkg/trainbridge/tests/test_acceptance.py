"""Secondary acceptance: a full toy run across the component boundary.

The corpus tooling is driven through its CLI in a subprocess; the bridge
consumes only the files it wrote, and the resulting run records flow back into
the aggregator CLI. Budget: 15 minutes on CPU.
"""

import json
import random
import subprocess
import sys
import time

from trainbridge.config import TrainConfig
from trainbridge.finetune import finetune_eval
from trainbridge.pretrain import continued_pretrain

from conftest import binary_task_rows, corpus_rows, write_jsonl


def run_domforge(*argv) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "domforge", *argv], capture_output=True, text=True
    )


def test_end_to_end_toy_run(tmp_path):
    start = time.perf_counter()
    rng = random.Random(2468)

    # raw inputs for the data pipeline
    raw = tmp_path / "raw.jsonl"
    write_jsonl(raw, corpus_rows(rng, 1000))
    task_ref = tmp_path / "task_ref.jsonl"
    write_jsonl(
        task_ref,
        [
            {"id": f"tr{i:03d}", "source": "reports",
             "text": " ".join(rng.choice(["climate", "carbon", "risk", "policy",
                                           "energy", "the", "of", "report"])
                              for _ in range(20)),
             "label": "yes" if i % 2 else "no"}
            for i in range(20)
        ],
    )
    base_vocab = tmp_path / "base_vocab.txt"
    base_vocab.write_text(
        "".join(t + "\n" for t in sorted({"the", "a", "of", "and", "to", "in",
                                          "for", "on", "with", "report", ".", ","}))
    )
    config_path = tmp_path / "pipeline.json"
    config_path.write_text(json.dumps({
        "inputs": [str(raw)],
        "out_dir": str(tmp_path / "out"),
        "source_default": "other",
        "base_vocab": str(base_vocab),
        "task_file": str(task_ref),
        "selection": {"strategy": "sim", "keep_fraction": 0.7,
                      "reference_vocab_size": 500},
        "augment": {"k": 15},
        "split": {"train_fraction": 0.8, "seed": 11, "input": "selected"},
    }))

    proc = run_domforge("pipeline", "--config", str(config_path))
    assert proc.returncode == 0, proc.stderr
    out = tmp_path / "out"
    assert (out / "mlm" / "manifest.json").exists()
    assert (out / "added_tokens.txt").exists()

    # continued pretraining on the exported artifacts
    config = TrainConfig()
    config.model.num_layers = 2
    config.model.hidden_size = 64
    config.model.num_heads = 4
    config.model.ffn_size = 128
    config.model.max_seq_len = 48
    config.pretrain.batch_size = 32
    config.pretrain.micro_batch_size = 16
    config.pretrain.epochs = 2
    config.max_steps = 300
    ckpt = tmp_path / "ckpt"
    log = continued_pretrain(out / "mlm", base_vocab, out / "added_tokens.txt",
                             config, ckpt)
    assert log["epoch_val_losses"][-1] < log["initial_val_loss"]
    assert log["added_tokens"] == 15

    # repeated fine-tuning runs on a 100-example toy task
    task_path = tmp_path / "task.jsonl"
    write_jsonl(task_path, binary_task_rows(rng, 100))
    config.downstream.max_epochs = 6
    config.max_steps = 200
    results = finetune_eval(task_path, ckpt, config, n_runs=5,
                            out_dir=tmp_path / "runs")
    assert len(results) == 5

    # the aggregator consumes the bridge's run records without error
    agg_json = tmp_path / "aggregate.json"
    proc = run_domforge(
        "aggregate",
        "--runs", f"toy-model={tmp_path / 'runs' / 'runresults.jsonl'}",
        "--out", str(agg_json),
    )
    assert proc.returncode == 0, proc.stderr
    assert "toy-model" in proc.stdout
    assert "₍" in proc.stdout  # mean with std subscript rendering
    report = json.loads(agg_json.read_text())["toy-model"]
    assert report["n_runs"] == 5
    assert 0.0 <= report["mean_f1"] <= 1.0
    assert report["std_f1"] >= 0.0

    elapsed = time.perf_counter() - start
    assert elapsed < 15 * 60, f"end-to-end run took {elapsed:.0f}s"
    print(f"PASS end-to-end-toy-run ({elapsed:.1f}s < 900s)")
