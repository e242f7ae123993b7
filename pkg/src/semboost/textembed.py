"""Text conditioning: sentence + word embeddings behind a pluggable interface.

The built-in "toy" embedder stands in for a pretrained encoder: tokens hash
into a fixed seeded codebook, the sentence vector is the normalized mean of
the word vectors. It is deterministic across processes and platforms
(hashing uses blake2b, not Python's salted hash). External encoders plug in
by dropping precomputed condition files (see PrecomputedTextEmbedder).
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EMBED_DIM = 512
MAX_WORDS = 77  # condition slots; two are reserved for adapter markers
_CODEBOOK_ROWS = 8192
_CODEBOOK_SEED = 20231109

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:[-'][a-z0-9]+)*")


@dataclass(frozen=True)
class TextCondition:
    sentence: np.ndarray  # (512,)
    words: np.ndarray  # (77, 512), zero rows beyond the mask
    mask: np.ndarray  # (77,) bool, True on real tokens
    is_null: bool = False

    def __post_init__(self):
        if self.sentence.shape != (EMBED_DIM,):
            raise ValueError("sentence embedding must be 512-dim")
        if self.words.shape != (MAX_WORDS, EMBED_DIM):
            raise ValueError(f"words must be ({MAX_WORDS}, {EMBED_DIM})")
        if self.mask.shape != (MAX_WORDS,):
            raise ValueError("mask length mismatch")


def null_condition() -> TextCondition:
    """The unconditional embedding: all-zero vectors, empty mask."""
    return TextCondition(
        sentence=np.zeros(EMBED_DIM),
        words=np.zeros((MAX_WORDS, EMBED_DIM)),
        mask=np.zeros(MAX_WORDS, dtype=bool),
        is_null=True,
    )


def tokenize(text: str) -> list:
    """Lowercase word tokens; punctuation splits, hyphens/apostrophes bind."""
    return _TOKEN_RE.findall(text.lower())


class ToyTextEmbedder:
    """Deterministic hash-codebook embedder."""

    name = "toy"

    def __init__(self):
        rng = np.random.default_rng(_CODEBOOK_SEED)
        book = rng.standard_normal((_CODEBOOK_ROWS, EMBED_DIM))
        self._codebook = book / np.linalg.norm(book, axis=1, keepdims=True)

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        row = int.from_bytes(digest, "little") % _CODEBOOK_ROWS
        return self._codebook[row]

    def embed(self, text: str) -> TextCondition:
        """Embed a caption; same text gives bit-identical output.

        Tokens beyond the 75 = 77-2 content slots are truncated (the two
        spare slots keep room for encoders that add start/end markers).
        """
        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        tokens = tokenize(text)[: MAX_WORDS - 2]
        if not tokens:
            raise ValueError("text contains no embeddable tokens")
        words = np.zeros((MAX_WORDS, EMBED_DIM))
        mask = np.zeros(MAX_WORDS, dtype=bool)
        for i, tok in enumerate(tokens):
            words[i] = self._token_vector(tok)
            mask[i] = True
        sentence = words[mask].mean(axis=0)
        sentence = sentence / np.linalg.norm(sentence)
        return TextCondition(sentence=sentence, words=words, mask=mask)


class PrecomputedTextEmbedder:
    """Loads conditions exported by an external encoder.

    Each caption id maps to a motion-binary-format pair holding a
    (1 + 77) x 512 matrix: row 0 is the sentence embedding, the rest are word
    embeddings with zero rows marking padding.
    """

    name = "precomputed"

    def __init__(self, directory):
        self._dir = Path(directory)

    def embed_id(self, item_id: str) -> TextCondition:
        from .motion.io import _read_pair

        header, data = _read_pair(self._dir / item_id)
        if data.shape != (1 + MAX_WORDS, EMBED_DIM):
            raise ValueError(
                f"{item_id}: expected {(1 + MAX_WORDS, EMBED_DIM)}, got {data.shape}"
            )
        words = data[1:]
        mask = np.any(words != 0.0, axis=1)
        return TextCondition(sentence=data[0], words=words, mask=mask)

    def save_id(self, item_id: str, cond: TextCondition) -> None:
        from .motion.io import _write_pair

        data = np.concatenate([cond.sentence[None, :], cond.words], axis=0)
        header = {
            "n_frames": 1 + MAX_WORDS,
            "dim": EMBED_DIM,
            "fps": 0.0,
            "joint_count": 0,
            "rotation_span": 0,
        }
        _write_pair(self._dir / item_id, header, data)


def get_embedder(name: str, directory=None):
    """Embedder registry used by config files ("toy" is built in)."""
    if name == "toy":
        return ToyTextEmbedder()
    if name == "precomputed":
        if directory is None:
            raise ValueError("precomputed embedder needs a directory")
        return PrecomputedTextEmbedder(directory)
    raise ValueError(f"unknown embedder {name!r}")
