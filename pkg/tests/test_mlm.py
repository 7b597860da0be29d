import json
import random

import numpy as np
import pytest

from domforge.corpus import read_corpus_jsonl
from domforge.errors import DataError
from domforge.mlm import (
    IGNORE_INDEX,
    MaskingConfig,
    SplitSpec,
    export_mlm_dataset,
    mask_tokens,
    masked_fraction,
    render_mask_preview,
    split_train_val,
)

from conftest import make_corpus


class TestSplit:
    def test_eight_two(self):
        corpus = make_corpus(random.Random(1), 10)
        train, val = split_train_val(corpus, SplitSpec(seed=42, train_fraction=0.8))
        assert len(train) == 8
        assert len(val) == 2

    def test_same_seed_identical(self):
        corpus = make_corpus(random.Random(2), 50)
        spec = SplitSpec(seed=7, train_fraction=0.8)
        a = split_train_val(corpus, spec)
        b = split_train_val(corpus, spec)
        assert a[0].ids() == b[0].ids()
        assert a[1].ids() == b[1].ids()

    def test_different_seeds_differ(self):
        corpus = make_corpus(random.Random(3), 100)
        a, _ = split_train_val(corpus, SplitSpec(seed=1, train_fraction=0.8))
        b, _ = split_train_val(corpus, SplitSpec(seed=2, train_fraction=0.8))
        assert a.ids() != b.ids()

    def test_fifty_seeds_disjoint_exhaustive(self):
        corpus = make_corpus(random.Random(4), 1001)
        all_ids = set(corpus.ids())
        for seed in range(50):
            train, val = split_train_val(corpus, SplitSpec(seed=seed, train_fraction=0.8))
            train_ids, val_ids = set(train.ids()), set(val.ids())
            assert train_ids | val_ids == all_ids
            assert not (train_ids & val_ids)
            assert len(train) == round(0.8 * 1001)

    def test_stratified_split(self):
        corpus = make_corpus(random.Random(5), 40)
        train, val = split_train_val(
            corpus, SplitSpec(seed=9, train_fraction=0.8), stratify_by_source=True
        )
        assert set(train.ids()) | set(val.ids()) == set(corpus.ids())
        assert not (set(train.ids()) & set(val.ids()))

    def test_too_small_error(self):
        corpus = make_corpus(random.Random(6), 1)
        with pytest.raises(DataError, match="too small"):
            split_train_val(corpus, SplitSpec(seed=0))

    def test_order_preserved_within_splits(self):
        corpus = make_corpus(random.Random(7), 30)
        train, val = split_train_val(corpus, SplitSpec(seed=3, train_fraction=0.5))
        position = {pid: i for i, pid in enumerate(corpus.ids())}
        assert train.ids() == sorted(train.ids(), key=position.__getitem__)
        assert val.ids() == sorted(val.ids(), key=position.__getitem__)


def _cfg(**kwargs):
    base = dict(mask_token_id=0, vocab_size=1000, seed=11)
    base.update(kwargs)
    return MaskingConfig(**base)


class TestMaskTokens:
    def test_probability_zero_identity(self):
        ids = list(range(1, 101))
        batch = mask_tokens(ids, _cfg(mask_probability=0.0))
        assert batch.input_ids.tolist() == ids
        assert all(l == IGNORE_INDEX for l in batch.labels.tolist())

    def test_probability_one_all_masked(self):
        ids = list(range(1, 101))
        cfg = _cfg(
            mask_probability=1.0,
            replace_mask_fraction=1.0,
            replace_random_fraction=0.0,
            keep_fraction=0.0,
        )
        batch = mask_tokens(ids, cfg)
        assert all(i == cfg.mask_token_id for i in batch.input_ids.tolist())
        assert batch.labels.tolist() == ids

    def test_special_positions_never_selected(self):
        specials = {1, 2, 3}
        ids = [1, 2, 3] * 200
        cfg = _cfg(mask_probability=1.0, special_token_ids=frozenset(specials),
                   replace_mask_fraction=1.0, replace_random_fraction=0.0, keep_fraction=0.0)
        batch = mask_tokens(ids, cfg)
        assert batch.input_ids.tolist() == ids
        assert all(l == IGNORE_INDEX for l in batch.labels.tolist())

    def test_labels_equal_length_and_original_values(self):
        rng = np.random.default_rng(5)
        ids = rng.integers(4, 1000, size=5000).tolist()
        batch = mask_tokens(ids, _cfg())
        assert batch.input_ids.size == batch.labels.size == 5000
        sel = batch.selected
        assert np.array_equal(batch.labels[sel], np.asarray(ids)[sel])
        assert np.all(batch.labels[~sel] == IGNORE_INDEX)

    def test_deterministic_per_seed_and_sequence(self):
        ids = list(range(500))
        a = mask_tokens(ids, _cfg(), sequence_index=3)
        b = mask_tokens(ids, _cfg(), sequence_index=3)
        c = mask_tokens(ids, _cfg(), sequence_index=4)
        assert np.array_equal(a.input_ids, b.input_ids)
        assert np.array_equal(a.labels, b.labels)
        assert not np.array_equal(a.input_ids, c.input_ids)

    def test_fraction_validation(self):
        with pytest.raises(DataError, match="sum to 1"):
            _cfg(replace_mask_fraction=0.9)

    def test_out_of_vocab_ids_rejected(self):
        with pytest.raises(DataError):
            mask_tokens([5, 2000], _cfg())

    def test_masked_fraction_statistics_small(self):
        ids = list(range(4, 1000)) * 50
        batch = mask_tokens(ids, _cfg(seed=123))
        assert masked_fraction(batch) == pytest.approx(0.15, abs=0.01)


class TestExport:
    def _split_corpus(self, n=10, seed=42):
        corpus = make_corpus(random.Random(8), n)
        return split_train_val(corpus, SplitSpec(seed=seed, train_fraction=0.8))

    def test_manifest_counts(self, tmp_path):
        train, val = self._split_corpus()
        manifest = export_mlm_dataset(train, val, tmp_path / "mlm", SplitSpec(seed=42))
        assert manifest["train_count"] == 8
        assert manifest["val_count"] == 2
        assert manifest["seed"] == 42
        assert manifest["created_at"] == "1970-01-01T00:00:00Z"

    def test_re_export_identical_bytes(self, tmp_path):
        train, val = self._split_corpus()
        spec = SplitSpec(seed=42)
        export_mlm_dataset(train, val, tmp_path / "a", spec)
        export_mlm_dataset(train, val, tmp_path / "b", spec)
        for name in ("train.jsonl", "val.jsonl", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_roundtrip_reingest(self, tmp_path):
        train, val = self._split_corpus(n=40)
        export_mlm_dataset(train, val, tmp_path, SplitSpec(seed=42))
        train_back = read_corpus_jsonl(tmp_path / "train.jsonl")
        val_back = read_corpus_jsonl(tmp_path / "val.jsonl")
        assert [(p.id, p.source, p.text) for p in train_back] == [
            (p.id, p.source, p.text) for p in train
        ]
        assert [(p.id, p.source, p.text) for p in val_back] == [
            (p.id, p.source, p.text) for p in val
        ]

    def test_manifest_checksum_recomputable_from_files(self, tmp_path):
        # the bridge-side contract: id-sorted canonical hash over train + val
        import hashlib

        train, val = self._split_corpus(n=30)
        manifest = export_mlm_dataset(train, val, tmp_path, SplitSpec(seed=42))
        rows = []
        for name in ("train.jsonl", "val.jsonl"):
            with open(tmp_path / name, encoding="utf-8") as fh:
                for line in fh:
                    rows.append(json.loads(line))
        digest = hashlib.sha256()
        for row in sorted(rows, key=lambda r: r["id"]):
            canonical = json.dumps(
                {"id": row["id"], "source": row["source"], "text": row["text"]},
                ensure_ascii=False,
                separators=(",", ":"),
            )
            digest.update(canonical.encode("utf-8") + b"\n")
        assert digest.hexdigest() == manifest["source_checksum"]


def test_render_mask_preview_alignment():
    tokens = ["the", "climate", "report"]
    cfg = MaskingConfig(mask_token_id=3, vocab_size=4, seed=0, mask_probability=1.0,
                        replace_mask_fraction=1.0, replace_random_fraction=0.0,
                        keep_fraction=0.0)
    batch = mask_tokens([0, 1, 2], cfg)
    text = render_mask_preview(tokens, batch, {0: "the", 1: "climate", 2: "report", 3: "[MASK]"})
    lines = text.splitlines()
    assert lines[0].startswith("original")
    assert "[MASK]" in lines[1]
    assert "climate" in lines[2]


def test_export_io_failure_names_path(tmp_path):
    corpus = make_corpus(random.Random(9), 10)
    train, val = split_train_val(corpus, SplitSpec(seed=1, train_fraction=0.8))
    blocker = tmp_path / "blocked"
    blocker.write_text("a file where a directory must go")
    with pytest.raises(DataError, match="blocked"):
        export_mlm_dataset(train, val, blocker, SplitSpec(seed=1))
