"""Sentence encoders.

The default is a pretrained sentence-transformer (CPU inference is fine at
corpus scale).  The hashing encoder is a deterministic, dependency-free
stand-in for offline environments and tests; it is never selected
implicitly.
"""

from __future__ import annotations

import hashlib

import numpy as np


class SentenceTransformerEncoder:
    """Wraps a sentence-transformers model chosen by identifier."""

    def __init__(self, model_id: str, device: str = "cpu"):
        self.model_id = model_id
        self.name = model_id
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ValueError(
                f"encoder load failure: sentence-transformers not installed ({exc})"
            ) from exc
        try:
            self._model = SentenceTransformer(model_id, device=device)
        except Exception as exc:
            raise ValueError(
                f"encoder load failure: could not load {model_id!r}: {exc}"
            ) from exc

    def encode_batch(self, texts: list[str]) -> np.ndarray:
        emb = self._model.encode(
            texts, convert_to_numpy=True, show_progress_bar=False
        )
        return np.asarray(emb, dtype=np.float32)


class HashingEncoder:
    """Deterministic feature-hashing encoder over word unigrams and bigrams.

    Tokens are bucketed by a stable content hash with a +/-1 sign bit, so
    identical sentences always map to identical vectors on any machine.
    """

    def __init__(self, dim: int = 256):
        if dim < 2:
            raise ValueError("hashing encoder dim must be >= 2")
        self.dim = dim
        self.name = f"hashing-{dim}"

    @staticmethod
    def _bucket(feature: str, dim: int) -> tuple[int, float]:
        digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
        value = int.from_bytes(digest, "little")
        sign = 1.0 if value & 1 else -1.0
        return (value >> 1) % dim, sign

    def encode_batch(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float32)
        for i, text in enumerate(texts):
            tokens = text.lower().split()
            features = tokens + [
                f"{a} {b}" for a, b in zip(tokens, tokens[1:])
            ]
            if not features:
                features = ["<empty>"]
            for feature in features:
                j, sign = self._bucket(feature, self.dim)
                out[i, j] += sign
            if not out[i].any():
                # sign cancellation guard: keep every row nonzero
                out[i, self._bucket("<guard>", self.dim)[0]] = 1.0
        return out


def make_encoder(model: str):
    """Build an encoder from its identifier.

    ``hashing:<dim>`` selects the offline hashing encoder; anything else is
    treated as a sentence-transformers model id or local path.
    """
    if model.startswith("hashing:"):
        spec = model.split(":", 1)[1]
        try:
            dim = int(spec)
        except ValueError as exc:
            raise ValueError(f"bad hashing encoder dim: {spec!r}") from exc
        return HashingEncoder(dim=dim)
    return SentenceTransformerEncoder(model)
