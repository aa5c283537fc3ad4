"""Stable seed derivation so one seed reproduces a whole experiment."""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *tags: object) -> int:
    """Derive a per-stage seed as ``seed XOR stable-hash(tags)``.

    The hash is content-based (SHA-256 of the repr of the tags), so it is
    stable across processes and Python versions, unlike the built-in
    ``hash``.  The result is a non-negative 64-bit integer suitable for
    ``numpy.random.default_rng``.
    """
    text = "\x1f".join(repr(t) for t in tags)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return (int(seed) ^ int.from_bytes(digest[:8], "little")) & _MASK64
