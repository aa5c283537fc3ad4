"""Document embeddings: EMB1 file IO, an LSA fallback embedder, and PCA.

EMB1 is the interchange format with the external embedding exporter:
4 ASCII bytes "EMB1", uint32-LE n_docs, uint32-LE dim, then
n_docs * dim IEEE-754 float32-LE values, row-major.  Row i aligns with
document i of the corpus file the exporter was given.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import DocTermMatrix
from .validation import as_float_array

EMB1_MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


@dataclass
class EmbeddingMatrix:
    """Dense document embeddings; row i aligns with corpus documents[i]."""

    values: np.ndarray

    def __post_init__(self):
        self.values = as_float_array(self.values, "embedding values", ndim=2)

    @property
    def n_docs(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def load_embeddings(path: str | Path, expected_n: int) -> EmbeddingMatrix:
    """Read an EMB1 file and check it against the expected corpus size."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated EMB1 header")
    magic, n_docs, dim = _HEADER.unpack_from(raw)
    if magic != EMB1_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}, expected {EMB1_MAGIC!r}")
    expected_payload = n_docs * dim * 4
    payload = raw[_HEADER.size:]
    if len(payload) != expected_payload:
        raise ValueError(
            f"{path}: payload size mismatch "
            f"(header implies {expected_payload} bytes, found {len(payload)})"
        )
    if n_docs != expected_n:
        raise ValueError(
            f"{path}: row count mismatch (file has {n_docs}, expected {expected_n})"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(n_docs, dim)
    if values.size and not np.all(np.isfinite(values)):
        raise ValueError(f"{path}: non-finite embedding values")
    return EmbeddingMatrix(values=values.astype(np.float64))


def emb1_bytes(emb: EmbeddingMatrix) -> bytes:
    """Serialize an EmbeddingMatrix in EMB1 format (values as float32)."""
    header = _HEADER.pack(EMB1_MAGIC, emb.n_docs, emb.dim)
    return header + np.ascontiguousarray(emb.values, dtype="<f4").tobytes()


def write_embeddings(emb: EmbeddingMatrix, path: str | Path) -> None:
    Path(path).write_bytes(emb1_bytes(emb))


def _range_basis(a, rank: int, rng: np.random.Generator,
                 oversample: int = 8, power_iters: int = 2) -> np.ndarray:
    """Orthonormal basis approximating the range of ``a`` by randomized
    subspace iteration (Gaussian test matrix, QR re-orthonormalization)."""
    n_rows, n_cols = a.shape
    n_samples = min(rank + oversample, min(n_rows, n_cols))
    omega = rng.standard_normal((n_cols, n_samples))
    q, _ = np.linalg.qr(np.asarray(a @ omega))
    for _ in range(power_iters):
        z, _ = np.linalg.qr(np.asarray(a.T @ q))
        q, _ = np.linalg.qr(np.asarray(a @ z))
    return q


def _top_right_singular_vectors(a, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Top ``rank`` right singular vectors of ``a`` as columns (n_cols x rank)."""
    q = _range_basis(a, rank, rng)
    b = np.asarray((a.T @ q)).T  # (n_samples x n_cols), dense and small
    _, _, vt = np.linalg.svd(b, full_matrices=False)
    return vt[:rank].T


def lsa_embed(dtm: DocTermMatrix, dim: int = 64, seed: int = 0) -> EmbeddingMatrix:
    """Latent-semantic embeddings of the TF-IDF rows.

    Projects each document onto the top-``dim`` right singular subspace of
    the matrix (randomized subspace iteration, oversampling 8, 2 power
    iterations) and L2-normalizes nonzero rows.  Used when no external
    transformer embeddings are supplied.
    """
    n_docs, n_terms = dtm.rows, dtm.cols
    if n_docs == 0 or n_terms == 0:
        raise ValueError("empty document-term matrix")
    if not 1 <= dim <= min(n_docs, n_terms):
        raise ValueError(
            f"dim must be in [1, {min(n_docs, n_terms)}], got {dim}"
        )
    rng = np.random.default_rng(seed)
    v = _top_right_singular_vectors(dtm.matrix, dim, rng)
    emb = np.asarray(dtm.matrix @ v)
    norms = np.linalg.norm(emb, axis=1)
    nonzero = norms > 0
    emb[nonzero] /= norms[nonzero, np.newaxis]
    return EmbeddingMatrix(values=emb)


def reduce_dim(emb: EmbeddingMatrix, target_dim: int, seed: int = 0) -> EmbeddingMatrix:
    """PCA projection onto the top ``target_dim`` principal components.

    Rows are mean-centered first; the seed feeds the randomized
    eigensolver only, so output is deterministic given (input, seed).
    """
    if not 1 <= target_dim <= emb.dim:
        raise ValueError(f"target_dim must be in [1, {emb.dim}], got {target_dim}")
    centered = emb.values - emb.values.mean(axis=0)
    rng = np.random.default_rng(seed)
    components = _top_right_singular_vectors(centered, target_dim, rng)
    k = min(target_dim, components.shape[1])
    scores = centered @ components[:, :k]
    if k < target_dim:
        # rank-deficient input: pad with zero variance directions
        scores = np.hstack([scores, np.zeros((emb.n_docs, target_dim - k))])
    return EmbeddingMatrix(values=scores)
