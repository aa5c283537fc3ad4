"""EMB1 IO, LSA embedding, and PCA reduction tests."""

import struct

import numpy as np
import pytest
import scipy.sparse as sp

from topicmetrics.corpus import DocTermMatrix, Vocabulary
from topicmetrics.embedding import (
    EmbeddingMatrix,
    emb1_bytes,
    load_embeddings,
    lsa_embed,
    reduce_dim,
    write_embeddings,
)


def _dtm(dense, weighting="tfidf"):
    dense = np.asarray(dense, dtype=np.float64)
    terms = [f"w{j}" for j in range(dense.shape[1])]
    vocab = Vocabulary(
        terms=terms,
        index={t: j for j, t in enumerate(terms)},
        doc_freq={t: 1 for t in terms},
    )
    return DocTermMatrix(matrix=sp.csr_matrix(dense), vocabulary=vocab, weighting=weighting)


class TestEmb1:
    def test_round_trip_bit_exact(self, tmp_path):
        values = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        emb = EmbeddingMatrix(values=values)
        path = tmp_path / "e.emb1"
        write_embeddings(emb, path)
        loaded = load_embeddings(path, expected_n=2)
        assert loaded.values.shape == (2, 3)
        assert np.array_equal(loaded.values, values)
        # write(load(x)) is byte-identical
        assert emb1_bytes(loaded) == path.read_bytes()

    def test_row_count_mismatch(self, tmp_path):
        emb = EmbeddingMatrix(values=np.zeros((5, 2)))
        path = tmp_path / "e.emb1"
        write_embeddings(emb, path)
        with pytest.raises(ValueError, match="row count mismatch"):
            load_embeddings(path, expected_n=4)

    def test_truncated_payload(self, tmp_path):
        emb = EmbeddingMatrix(values=np.ones((2, 3)))
        path = tmp_path / "e.emb1"
        path.write_bytes(emb1_bytes(emb)[:-4])
        with pytest.raises(ValueError, match="payload size mismatch"):
            load_embeddings(path, expected_n=2)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "e.emb1"
        path.write_bytes(b"NOPE" + struct.pack("<II", 1, 1) + b"\x00" * 4)
        with pytest.raises(ValueError, match="bad magic"):
            load_embeddings(path, expected_n=1)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "e.emb1"
        payload = struct.pack("<4sII", b"EMB1", 1, 1) + struct.pack("<f", float("nan"))
        path.write_bytes(payload)
        with pytest.raises(ValueError, match="non-finite"):
            load_embeddings(path, expected_n=1)


class TestLsaEmbed:
    def test_identity_gives_orthonormal_rows(self):
        emb = lsa_embed(_dtm(np.eye(2)), dim=2, seed=0)
        norms = np.linalg.norm(emb.values, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-12)
        assert abs(emb.values[0] @ emb.values[1]) < 1e-12

    def test_zero_row_stays_zero(self):
        emb = lsa_embed(_dtm([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]), dim=2, seed=0)
        assert np.all(emb.values[1] == 0.0)

    def test_dim_out_of_range(self):
        dtm = _dtm(np.eye(3))
        with pytest.raises(ValueError, match="dim must be"):
            lsa_embed(dtm, dim=4, seed=0)
        with pytest.raises(ValueError, match="dim must be"):
            lsa_embed(dtm, dim=0, seed=0)

    def test_near_optimal_reconstruction(self):
        # randomized subspace iteration vs the dense-SVD truncation optimum
        from topicmetrics.embedding import _top_right_singular_vectors

        rng = np.random.default_rng(11)
        for trial in range(20):
            a = rng.random((20, 30))
            dim = int(rng.integers(1, 8))
            dtm = _dtm(a)
            emb_rng = np.random.default_rng(trial)
            v = _top_right_singular_vectors(dtm.matrix, dim, emb_rng)
            err_rand = np.linalg.norm(a - (a @ v) @ v.T)
            u, s, vt = np.linalg.svd(a, full_matrices=False)
            err_opt = np.linalg.norm(a - (u[:, :dim] * s[:dim]) @ vt[:dim])
            assert err_rand <= 1.05 * err_opt + 1e-12

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        dtm = _dtm(rng.random((10, 12)))
        a = lsa_embed(dtm, dim=4, seed=9)
        b = lsa_embed(dtm, dim=4, seed=9)
        assert np.array_equal(a.values, b.values)


class TestReduceDim:
    def test_full_rank_preserves_distances(self):
        rng = np.random.default_rng(5)
        emb = EmbeddingMatrix(values=rng.random((8, 4)))
        out = reduce_dim(emb, target_dim=4, seed=0)
        d_in = np.linalg.norm(emb.values[:, None] - emb.values[None], axis=2)
        d_out = np.linalg.norm(out.values[:, None] - out.values[None], axis=2)
        assert np.allclose(d_in, d_out, atol=1e-9)

    def test_line_in_3d_to_1d(self):
        t = np.array([0.0, 1.0, 2.0, 3.5, 5.0])
        direction = np.array([1.0, -2.0, 0.5])
        points = np.outer(t, direction) + np.array([4.0, 4.0, 4.0])
        out = reduce_dim(EmbeddingMatrix(values=points), target_dim=1, seed=0)
        d_in = np.abs(t[:, None] - t[None]) * np.linalg.norm(direction)
        d_out = np.abs(out.values[:, 0][:, None] - out.values[:, 0][None])
        assert np.allclose(d_in, d_out, atol=1e-6)

    def test_output_columns_centered(self):
        rng = np.random.default_rng(17)
        emb = EmbeddingMatrix(values=rng.random((30, 6)) + 5.0)
        out = reduce_dim(emb, target_dim=3, seed=1)
        assert out.values.shape == (30, 3)
        assert np.all(np.abs(out.values.mean(axis=0)) < 1e-9)

    def test_target_dim_errors(self):
        emb = EmbeddingMatrix(values=np.zeros((4, 3)))
        with pytest.raises(ValueError, match="target_dim"):
            reduce_dim(emb, target_dim=0)
        with pytest.raises(ValueError, match="target_dim"):
            reduce_dim(emb, target_dim=4)
