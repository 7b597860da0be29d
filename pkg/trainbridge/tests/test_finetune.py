import json
import random

import pytest

from trainbridge.finetune import finetune_eval, load_checkpoint
from trainbridge.model import SequenceClassifier
from trainbridge.pretrain import continued_pretrain

from conftest import (
    binary_task_rows,
    corpus_rows,
    sentiment_task_rows,
    write_base_vocab,
    write_jsonl,
    write_mlm_dir,
)


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("ckpt")
    from trainbridge.config import TrainConfig

    config = TrainConfig()
    config.model.num_layers = 2
    config.model.hidden_size = 64
    config.model.num_heads = 4
    config.model.ffn_size = 128
    config.model.max_seq_len = 48
    config.pretrain.batch_size = 32
    config.pretrain.micro_batch_size = 16
    config.pretrain.epochs = 1
    config.max_steps = 20
    rows = corpus_rows(random.Random(3), 200)
    mlm = write_mlm_dir(tmp, rows)
    base = write_base_vocab(tmp / "base.txt")
    out = tmp / "model"
    continued_pretrain(mlm, base, None, config, out)
    return out, config


class TestFinetune:
    def test_two_runs_emit_parseable_results(self, tmp_path, checkpoint):
        ckpt, config = checkpoint
        task_path = tmp_path / "task.jsonl"
        write_jsonl(task_path, binary_task_rows(random.Random(5), 50))
        config.downstream.max_epochs = 3
        config.max_steps = 60
        results = finetune_eval(task_path, ckpt, config, n_runs=2, out_dir=tmp_path / "out")

        lines = (tmp_path / "out" / "runresults.jsonl").read_text().splitlines()
        assert len(lines) == len(results) == 2
        for i, line in enumerate(lines, start=1):
            obj = json.loads(line)
            assert set(obj) == {"run_index", "val_loss", "weighted_f1"}
            assert obj["run_index"] == i
            assert obj["val_loss"] >= 0
            assert 0.0 <= obj["weighted_f1"] <= 1.0

    def test_identical_seed_identical_result(self, tmp_path, checkpoint):
        ckpt, config = checkpoint
        task_path = tmp_path / "task.jsonl"
        write_jsonl(task_path, binary_task_rows(random.Random(7), 40))
        config.downstream.max_epochs = 2
        config.max_steps = 30
        first = finetune_eval(task_path, ckpt, config, n_runs=1, out_dir=tmp_path / "a")
        second = finetune_eval(task_path, ckpt, config, n_runs=1, out_dir=tmp_path / "b")
        assert first == second

    def test_three_class_task_gets_three_output_neurons(self, tmp_path, checkpoint):
        ckpt, config = checkpoint
        task_path = tmp_path / "task.jsonl"
        write_jsonl(task_path, sentiment_task_rows(random.Random(9), 30))
        config.downstream.max_epochs = 1
        config.max_steps = 10
        finetune_eval(task_path, ckpt, config, n_runs=1, out_dir=tmp_path / "out")
        metadata = json.loads((tmp_path / "out" / "metadata.json").read_text())
        assert metadata["output_neurons"] == 3
        assert metadata["classes"] == ["opportunity", "neutral", "risk"]
        assert metadata["overrides"]

        model, _ = load_checkpoint(ckpt, config)
        head = SequenceClassifier(model.encoder, 3)
        assert head.num_classes == 3
        assert head.out_proj.out_features == 3

    def test_resample_is_ninety_ten_per_run(self, tmp_path, checkpoint):
        from trainbridge.finetune import _resample_indices

        train, val = _resample_indices(100, run_index=1)
        assert len(train) == 90
        assert len(val) == 10
        assert sorted(train + val) == list(range(100))
        assert _resample_indices(100, 1) == (train, val)
        assert _resample_indices(100, 2) != (train, val)
