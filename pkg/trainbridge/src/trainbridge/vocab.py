"""Word-level tokenizer over a base vocabulary file plus appended domain tokens.

The token rule mirrors the corpus tooling's documented contract: lowercase,
with letter/digit runs as words and punctuation runs split off, so the tokens
in an added-token artifact line up with what this tokenizer produces.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import ArtifactError

_TOKEN_RE = re.compile(r"[^\W_]+|[^\w\s]+|_+")

PAD, UNK, BOS, EOS, MASK = "<pad>", "<unk>", "<s>", "</s>", "<mask>"
SPECIAL_TOKENS = (PAD, UNK, BOS, EOS, MASK)


def word_tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class WordVocab:
    """Token <-> id mapping with fixed special tokens at the front."""

    def __init__(self, tokens: list[str] | None = None):
        self._tokens: list[str] = list(SPECIAL_TOKENS)
        self._index: dict[str, int] = {t: i for i, t in enumerate(self._tokens)}
        if tokens:
            self.extend(tokens, strict=False)

    @classmethod
    def from_base_file(cls, path: str | Path) -> "WordVocab":
        path = Path(path)
        if not path.exists():
            raise ArtifactError(f"base vocabulary not found: {path}")
        tokens = [
            line.rstrip("\n")
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        return cls(tokens)

    def extend(self, tokens: list[str], strict: bool = True) -> int:
        """Append new tokens; returns how many rows the embedding must grow by.

        With ``strict`` a token that already exists indicates a corrupted
        added-token artifact and is refused.
        """
        added = 0
        for tok in tokens:
            if tok in self._index:
                if strict:
                    raise ArtifactError(f"token already present in vocabulary: {tok!r}")
                continue
            self._index[tok] = len(self._tokens)
            self._tokens.append(tok)
            added += 1
        return added

    def __len__(self) -> int:
        return len(self._tokens)

    @property
    def pad_id(self) -> int:
        return self._index[PAD]

    @property
    def unk_id(self) -> int:
        return self._index[UNK]

    @property
    def bos_id(self) -> int:
        return self._index[BOS]

    @property
    def eos_id(self) -> int:
        return self._index[EOS]

    @property
    def mask_id(self) -> int:
        return self._index[MASK]

    @property
    def special_ids(self) -> tuple[int, ...]:
        return tuple(self._index[t] for t in SPECIAL_TOKENS)

    def encode(self, text: str, max_len: int) -> list[int]:
        """<s> tokens </s>, truncated to max_len."""
        body = [self._index.get(t, self.unk_id) for t in word_tokenize(text)]
        body = body[: max(0, max_len - 2)]
        return [self.bos_id] + body + [self.eos_id]

    def tokens(self) -> list[str]:
        return list(self._tokens)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            "".join(t + "\n" for t in self._tokens), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "WordVocab":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if lines[: len(SPECIAL_TOKENS)] != list(SPECIAL_TOKENS):
            raise ArtifactError(f"not a saved vocabulary file: {path}")
        vocab = cls()
        vocab.extend(lines[len(SPECIAL_TOKENS):], strict=True)
        return vocab
