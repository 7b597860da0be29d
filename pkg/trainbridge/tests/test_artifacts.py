import json
import random

import pytest

from trainbridge.data import load_added_tokens, load_mlm_dataset, load_task_dataset
from trainbridge.errors import ArtifactError
from trainbridge.vocab import SPECIAL_TOKENS, WordVocab, word_tokenize

from conftest import corpus_rows, write_base_vocab, write_jsonl, write_mlm_dir


class TestWordVocab:
    def test_specials_first(self, tmp_path):
        vocab = WordVocab.from_base_file(write_base_vocab(tmp_path / "base.txt"))
        assert vocab.tokens()[:5] == list(SPECIAL_TOKENS)
        assert vocab.pad_id == 0

    def test_extend_grows_by_new_tokens_only(self, tmp_path):
        vocab = WordVocab.from_base_file(write_base_vocab(tmp_path / "base.txt"))
        before = len(vocab)
        assert vocab.extend(["zonal", "quake"], strict=True) == 2
        assert len(vocab) == before + 2

    def test_extend_strict_rejects_existing(self, tmp_path):
        vocab = WordVocab.from_base_file(write_base_vocab(tmp_path / "base.txt"))
        with pytest.raises(ArtifactError):
            vocab.extend(["the"], strict=True)

    def test_encode_frames_and_truncates(self, tmp_path):
        vocab = WordVocab.from_base_file(write_base_vocab(tmp_path / "base.txt"))
        ids = vocab.encode("the report and the data", max_len=4)
        assert ids[0] == vocab.bos_id
        assert ids[-1] == vocab.eos_id
        assert len(ids) == 4

    def test_unknown_tokens_map_to_unk(self, tmp_path):
        vocab = WordVocab.from_base_file(write_base_vocab(tmp_path / "base.txt"))
        ids = vocab.encode("xylophone", max_len=8)
        assert ids[1] == vocab.unk_id

    def test_tokenizer_matches_documented_rule(self):
        assert word_tokenize("CO2 emissions.") == ["co2", "emissions", "."]
        assert word_tokenize("+/- 5") == ["+/-", "5"]

    def test_save_load_roundtrip(self, tmp_path):
        vocab = WordVocab.from_base_file(write_base_vocab(tmp_path / "base.txt"))
        vocab.extend(["added1", "added2"], strict=True)
        vocab.save(tmp_path / "vocab.txt")
        back = WordVocab.load(tmp_path / "vocab.txt")
        assert back.tokens() == vocab.tokens()


class TestMlmArtifacts:
    def test_valid_dataset_loads(self, tmp_path):
        rows = corpus_rows(random.Random(1), 50)
        dataset = load_mlm_dataset(write_mlm_dir(tmp_path, rows))
        assert len(dataset.train) == 40
        assert len(dataset.val) == 10

    def test_tampered_file_refused(self, tmp_path):
        rows = corpus_rows(random.Random(2), 30)
        mlm = write_mlm_dir(tmp_path, rows)
        with open(mlm / "train.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"id": "evil", "source": "news", "text": "injected"}) + "\n")
        with pytest.raises(ArtifactError, match="refusing to run"):
            load_mlm_dataset(mlm)

    def test_wrong_counts_refused(self, tmp_path):
        rows = corpus_rows(random.Random(3), 30)
        mlm = write_mlm_dir(tmp_path, rows)
        manifest = json.loads((mlm / "manifest.json").read_text())
        manifest["train_count"] += 1
        # keep file hashes valid so the count check itself is exercised
        (mlm / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(ArtifactError, match="counts"):
            load_mlm_dataset(mlm)

    def test_wrong_source_checksum_refused(self, tmp_path):
        rows = corpus_rows(random.Random(4), 30)
        mlm = write_mlm_dir(tmp_path, rows)
        manifest = json.loads((mlm / "manifest.json").read_text())
        manifest["source_checksum"] = "0" * 64
        (mlm / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(ArtifactError, match="source_checksum"):
            load_mlm_dataset(mlm)

    def test_missing_manifest_refused(self, tmp_path):
        with pytest.raises(ArtifactError, match="manifest"):
            load_mlm_dataset(tmp_path)


class TestTaskArtifacts:
    def test_added_tokens_none_is_empty(self):
        assert load_added_tokens(None) == []

    def test_task_dataset_roundtrip(self, tmp_path):
        rows = [
            {"task": "sentiment", "text": "downside exposure", "label": "risk"},
            {"task": "sentiment", "text": "growth ahead", "label": "opportunity"},
        ]
        path = tmp_path / "task.jsonl"
        write_jsonl(path, rows)
        task, examples = load_task_dataset(path)
        assert task == "sentiment"
        assert [e.label for e in examples] == ["risk", "opportunity"]

    def test_label_outside_schema_rejected(self, tmp_path):
        path = tmp_path / "task.jsonl"
        write_jsonl(path, [{"task": "sentiment", "text": "x", "label": "bullish"}])
        with pytest.raises(ArtifactError, match="schema"):
            load_task_dataset(path)

    def test_mixed_tasks_rejected(self, tmp_path):
        path = tmp_path / "task.jsonl"
        write_jsonl(path, [
            {"task": "sentiment", "text": "x", "label": "risk"},
            {"task": "text_classification", "text": "y", "label": "yes"},
        ])
        with pytest.raises(ArtifactError, match="mixed"):
            load_task_dataset(path)
