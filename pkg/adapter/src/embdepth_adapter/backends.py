"""Embedding backends: a transformer model or a deterministic offline hash.

Model identifiers are pass-through strings. ``hash:<dim>`` selects the
built-in hashed bag-of-words backend (deterministic, no downloads), which
keeps tests and air-gapped runs working; anything else is treated as a
sentence-transformers model name and loaded lazily.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np


class ModelError(Exception):
    """The model identifier could not be resolved or loaded."""


_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


class HashedBowBackend:
    """Bag of words hashed into a fixed-dimension count vector.

    Deterministic in the text content alone: byte-identical texts always
    produce byte-identical vectors. Not semantically meaningful; intended
    for pipeline tests and offline smoke runs.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ModelError(f"hash backend dimension must be >= 1, got {dim}")
        self.dim = dim

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            for token in _TOKEN_RE.findall(text.lower()):
                digest = hashlib.sha256(token.encode("utf-8")).digest()
                out[row, int.from_bytes(digest[:8], "big") % self.dim] += 1.0
            if not out[row].any():
                # text had no word characters; hash the raw bytes so the
                # vector is still nonzero and deterministic
                digest = hashlib.sha256(text.encode("utf-8")).digest()
                out[row, int.from_bytes(digest[:8], "big") % self.dim] = 1.0
        return out


class SentenceTransformerBackend:
    """Thin wrapper over a sentence-transformers model (lazy import)."""

    def __init__(self, model_id: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelError(
                "sentence-transformers is not installed; install the "
                "'transformers' extra or use a hash:<dim> model"
            ) from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise ModelError(f"could not load model {model_id!r}: {exc}") from exc

    def encode(self, texts: list[str]) -> np.ndarray:
        return np.asarray(self._model.encode(texts, convert_to_numpy=True), dtype=np.float64)


def resolve_backend(model_id: str):
    if model_id.startswith("hash:"):
        try:
            dim = int(model_id.split(":", 1)[1])
        except ValueError:
            raise ModelError(f"bad hash model id {model_id!r}; expected hash:<dim>") from None
        return HashedBowBackend(dim)
    return SentenceTransformerBackend(model_id)
