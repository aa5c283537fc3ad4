"""Topic models with a uniform result type.

Three families are provided: collapsed-Gibbs LDA, multiplicative-update
NMF, and an embedding-cluster model (PCA + seeded k-means + class-based
TF-IDF).  All three are deterministic given their seed and expose
sklearn-style ``fit`` plus the shared :class:`TopicModelResult`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .corpus import DocTermMatrix
from .embedding import EmbeddingMatrix, reduce_dim
from .seeding import derive_seed


@dataclass
class TopicModelResult:
    """Uniform fitted-model view: soft distributions plus hard assignments.

    ``doc_topic`` rows sum to 1 for lda/nmf and are one-hot for cluster;
    ``assignments[i]`` is the argmax of row i (lowest id on ties).
    """

    model_kind: str
    k: int
    doc_topic: np.ndarray
    topic_term: np.ndarray
    assignments: np.ndarray
    terms: list[str]
    seed: int

    def validate(self) -> None:
        if not np.all(np.isfinite(self.doc_topic)) or not np.all(np.isfinite(self.topic_term)):
            raise ValueError("topic model contains non-finite values")
        if (self.doc_topic < 0).any() or (self.topic_term < 0).any():
            raise ValueError("topic model contains negative values")
        if not np.all(self.topic_term.max(axis=1) > 0):
            raise ValueError("topic_term has an all-zero row")
        expected = self.doc_topic.argmax(axis=1)
        if not np.array_equal(self.assignments, expected):
            raise ValueError("assignments do not match doc_topic argmax")


@dataclass
class TopicKeywords:
    """Per-topic (term, weight) lists, weights non-increasing."""

    topics: list[list[tuple[str, float]]]

    def word_lists(self) -> list[list[str]]:
        return [[term for term, _ in topic] for topic in self.topics]


def _count_dense(dtm: DocTermMatrix) -> np.ndarray:
    dense = dtm.dense()
    if (dense < 0).any():
        raise ValueError("document-term matrix has negative entries")
    rounded = np.rint(dense)
    if not np.allclose(dense, rounded, rtol=0, atol=1e-9):
        raise ValueError("count matrix has non-integral entries")
    return rounded


class GibbsLDA(BaseEstimator):
    """Latent Dirichlet Allocation via collapsed Gibbs sampling.

    Per token, topic k is drawn with probability proportional to
    ``(n_dk + alpha) * (n_kw + beta) / (n_k + V * beta)``.  Initial
    assignments come from one ``rng.integers(k)`` call per token and each
    sweep draws one ``rng.random()`` per token (inverse-CDF over the
    cumulative weights), in document order then token order; tokens of a
    document are its term indices in ascending order, each repeated by its
    count.  This sampling discipline is part of the contract so that an
    independent re-implementation with the same seed reproduces the chain
    bit-for-bit.

    ``alpha=None`` uses the 50/k default.
    """

    def __init__(self, k: int, alpha: float | None = None, beta: float = 0.01,
                 iterations: int = 1000, seed: int = 0, check_counts: bool = False):
        self.k = k
        self.alpha = alpha
        self.beta = beta
        self.iterations = iterations
        self.seed = seed
        self.check_counts = check_counts

    def fit(self, dtm: DocTermMatrix) -> "GibbsLDA":
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        counts = _count_dense(dtm)
        n_docs, n_terms = counts.shape
        if n_docs == 0 or counts.sum() == 0:
            raise ValueError("empty corpus")
        k = self.k
        alpha = 50.0 / k if self.alpha is None else float(self.alpha)
        beta = float(self.beta)
        if alpha <= 0 or beta <= 0:
            raise ValueError("alpha and beta must be > 0")

        docs = [np.repeat(np.arange(n_terms), counts[d].astype(np.int64))
                for d in range(n_docs)]
        rng = np.random.default_rng(self.seed)

        ndk = np.zeros((n_docs, k))
        nkw = np.zeros((k, n_terms))
        nk = np.zeros(k)
        z = [np.zeros(len(doc), dtype=np.int64) for doc in docs]
        for d, doc in enumerate(docs):
            for pos, w in enumerate(doc):
                topic = int(rng.integers(k))
                z[d][pos] = topic
                ndk[d, topic] += 1.0
                nkw[topic, w] += 1.0
                nk[topic] += 1.0

        vbeta = n_terms * beta
        for _ in range(self.iterations):
            for d, doc in enumerate(docs):
                ndk_d = ndk[d]
                zd = z[d]
                for pos, w in enumerate(doc):
                    topic = zd[pos]
                    ndk_d[topic] -= 1.0
                    nkw[topic, w] -= 1.0
                    nk[topic] -= 1.0
                    p = (ndk_d + alpha) * (nkw[:, w] + beta) / (nk + vbeta)
                    cum = np.cumsum(p)
                    u = rng.random() * cum[-1]
                    topic = int(np.searchsorted(cum, u, side="right"))
                    zd[pos] = topic
                    ndk_d[topic] += 1.0
                    nkw[topic, w] += 1.0
                    nk[topic] += 1.0
            if self.check_counts:
                self._assert_counts(docs, ndk, nkw, nk)

        lengths = np.array([len(doc) for doc in docs], dtype=np.float64)
        self.doc_topic_ = (ndk + alpha) / (lengths[:, np.newaxis] + k * alpha)
        self.topic_term_ = (nkw + beta) / (nk[:, np.newaxis] + vbeta)
        self.assignments_ = self.doc_topic_.argmax(axis=1)
        self.n_features_in_ = n_terms
        return self

    @staticmethod
    def _assert_counts(docs, ndk, nkw, nk) -> None:
        lengths = np.array([len(doc) for doc in docs], dtype=np.float64)
        assert np.array_equal(ndk.sum(axis=1), lengths), "doc count drift"
        assert np.array_equal(nkw.sum(axis=1), nk), "topic count drift"
        assert (ndk >= 0).all() and (nkw >= 0).all() and (nk >= 0).all(), "negative count"


class MultiplicativeNMF(BaseEstimator):
    """NMF minimizing ||V - WH||_F^2 by Lee-Seung multiplicative updates.

    W and H are initialized uniform-random in (0, 1] from the seed (or the
    ``init`` pair when given, a test hook).  Iteration stops when the
    relative objective decrease falls below ``tol`` or after
    ``iterations`` update pairs; the per-step objective is recorded in
    ``objective_history_``.
    """

    _EPS = 1e-12

    def __init__(self, k: int, iterations: int = 200, tol: float = 1e-9,
                 seed: int = 0, init: tuple[np.ndarray, np.ndarray] | None = None):
        self.k = k
        self.iterations = iterations
        self.tol = tol
        self.seed = seed
        self.init = init

    def fit(self, dtm: DocTermMatrix) -> "MultiplicativeNMF":
        if self.k < 1:
            raise ValueError("k must be >= 1")
        v = dtm.dense()
        if (v < 0).any():
            raise ValueError("matrix has negative entries")
        n, m = v.shape
        if self.init is not None:
            w = np.array(self.init[0], dtype=np.float64)
            h = np.array(self.init[1], dtype=np.float64)
            if w.shape != (n, self.k) or h.shape != (self.k, m):
                raise ValueError("init matrices have wrong shapes")
        else:
            rng = np.random.default_rng(self.seed)
            w = 1.0 - rng.random((n, self.k))
            h = 1.0 - rng.random((self.k, m))

        def objective() -> float:
            diff = v - w @ h
            return float(np.sum(diff * diff))

        history = [objective()]
        for _ in range(self.iterations):
            h *= (w.T @ v) / (w.T @ w @ h + self._EPS)
            w *= (v @ h.T) / (w @ h @ h.T + self._EPS)
            obj = objective()
            history.append(obj)
            prev = history[-2]
            if self.tol > 0 and (prev == 0.0 or (prev - obj) < self.tol * prev):
                break

        self.w_ = w
        self.h_ = h
        self.objective_history_ = history
        row_sums = w.sum(axis=1)
        doc_topic = np.full((n, self.k), 1.0 / self.k)
        nonzero = row_sums > 0
        doc_topic[nonzero] = w[nonzero] / row_sums[nonzero, np.newaxis]
        self.doc_topic_ = doc_topic
        self.topic_term_ = h.copy()
        self.assignments_ = doc_topic.argmax(axis=1)
        self.n_features_in_ = m
        return self


def c_tf_idf(dtm: DocTermMatrix, classes, n_classes: int) -> np.ndarray:
    """Class-based TF-IDF: ``tf_{t,c} * ln(1 + A / f_t)``.

    ``tf_{t,c}`` is the count of term t over all documents of class c,
    ``f_t`` the total count of t, and ``A`` the average token count per
    class.  Weight is zero exactly where ``tf_{t,c}`` is zero.
    """
    classes = np.asarray(classes, dtype=np.int64)
    if classes.shape != (dtm.rows,):
        raise ValueError("classes must give one id per document")
    if classes.size and (classes.min() < 0 or classes.max() >= n_classes):
        raise ValueError(f"class ids must lie in [0, {n_classes})")
    counts = dtm.dense()
    tf = np.zeros((n_classes, dtm.cols))
    for c in range(n_classes):
        members = classes == c
        if not members.any():
            raise ValueError(f"empty class {c}")
        tf[c] = counts[members].sum(axis=0)
    class_totals = tf.sum(axis=1)
    if (class_totals == 0).any():
        empty = int(np.argmin(class_totals))
        raise ValueError(f"empty class {empty}")
    f_t = counts.sum(axis=0)
    a = counts.sum() / n_classes
    factor = np.zeros_like(f_t)
    present = f_t > 0
    factor[present] = np.log1p(a / f_t[present])
    return tf * factor[np.newaxis, :]


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[int(rng.integers(n))]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = x[idx]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))
    return centers


def _kmeans(x: np.ndarray, k: int, rng: np.random.Generator,
            max_iter: int = 100, n_init: int = 10
            ) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Best of ``n_init`` seeded k-means++ runs by final SSE.

    Restarts guard against the poor local optima a single init falls into
    on symmetric data (deterministic tie-breaking makes those sticky).
    """
    best = None
    for _ in range(n_init):
        candidate = _kmeans_once(x, k, rng, max_iter)
        if best is None or candidate[2][-1] < best[2][-1]:
            best = candidate
    return best


def _kmeans_once(x: np.ndarray, k: int, rng: np.random.Generator,
                 max_iter: int = 100) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Seeded Lloyd iterations with k-means++ init.

    Empty clusters are reseeded to the point farthest from its assigned
    centroid (forced into the empty cluster), so every cluster stays
    nonempty.  Returns (assignments, centers, per-iteration SSE).
    """
    n = x.shape[0]
    centers = _kmeans_pp_init(x, k, rng)
    prev_assign = None
    sse_history: list[float] = []
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((x[:, np.newaxis, :] - centers[np.newaxis, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        point_d2 = d2[np.arange(n), assign]
        reseeded = False
        for j in range(k):
            if (assign == j).any():
                continue
            # reseed from a cluster that can spare a point (exists since k <= n)
            sizes = np.bincount(assign, minlength=k)
            candidates = np.flatnonzero(sizes[assign] > 1)
            far = int(candidates[point_d2[candidates].argmax()])
            centers[j] = x[far]
            assign[far] = j
            point_d2[far] = 0.0
            reseeded = True
        sse_history.append(float(point_d2.sum()))
        if (not reseeded and prev_assign is not None
                and np.array_equal(assign, prev_assign)):
            # converged: assignments are exactly the argmin of the final centers
            break
        prev_assign = assign.copy()
        for j in range(k):
            centers[j] = x[assign == j].mean(axis=0)
    else:
        # iteration budget exhausted: one pure assignment pass for consistency
        d2 = ((x[:, np.newaxis, :] - centers[np.newaxis, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        sse_history.append(float(d2[np.arange(n), assign].sum()))
    return assign, centers, sse_history


class ClusterTopicModel(BaseEstimator):
    """Embedding-cluster topics: PCA to ``reduce_to`` dims, seeded k-means
    (k-means++ init, <=100 iterations), then class-based TF-IDF over the
    clusters for the topic-term weights."""

    def __init__(self, k: int, seed: int = 0, reduce_to: int = 5,
                 kmeans_iterations: int = 100):
        self.k = k
        self.seed = seed
        self.reduce_to = reduce_to
        self.kmeans_iterations = kmeans_iterations

    def fit(self, emb: EmbeddingMatrix, dtm: DocTermMatrix) -> "ClusterTopicModel":
        if emb.n_docs != dtm.rows:
            raise ValueError(
                f"embedding rows ({emb.n_docs}) != corpus documents ({dtm.rows})"
            )
        if not 1 <= self.k <= emb.n_docs:
            raise ValueError(f"k must be in [1, {emb.n_docs}], got {self.k}")
        target = min(self.reduce_to, emb.dim)
        reduced = reduce_dim(emb, target, seed=derive_seed(self.seed, "pca"))
        rng = np.random.default_rng(derive_seed(self.seed, "kmeans"))
        assign, _, sse = _kmeans(reduced.values, self.k, rng,
                                 max_iter=self.kmeans_iterations)
        self.assignments_ = assign
        self.sse_history_ = sse
        doc_topic = np.zeros((emb.n_docs, self.k))
        doc_topic[np.arange(emb.n_docs), assign] = 1.0
        self.doc_topic_ = doc_topic
        self.topic_term_ = c_tf_idf(dtm, assign, self.k)
        self.n_features_in_ = emb.dim
        return self


def _result_from(estimator, model_kind: str, k: int, terms: list[str],
                 seed: int) -> TopicModelResult:
    result = TopicModelResult(
        model_kind=model_kind,
        k=k,
        doc_topic=estimator.doc_topic_,
        topic_term=estimator.topic_term_,
        assignments=estimator.assignments_,
        terms=list(terms),
        seed=seed,
    )
    result.validate()
    return result


def fit_lda(dtm: DocTermMatrix, k: int, alpha: float | None = None,
            beta: float = 0.01, iterations: int = 1000,
            seed: int = 0) -> TopicModelResult:
    model = GibbsLDA(k=k, alpha=alpha, beta=beta, iterations=iterations,
                     seed=seed).fit(dtm)
    return _result_from(model, "lda", k, dtm.vocabulary.terms, seed)


def fit_nmf(dtm: DocTermMatrix, k: int, iterations: int = 200,
            tol: float = 1e-9, seed: int = 0) -> TopicModelResult:
    model = MultiplicativeNMF(k=k, iterations=iterations, tol=tol,
                              seed=seed).fit(dtm)
    return _result_from(model, "nmf", k, dtm.vocabulary.terms, seed)


def fit_cluster_topics(emb: EmbeddingMatrix, dtm: DocTermMatrix, k: int,
                       seed: int = 0) -> TopicModelResult:
    model = ClusterTopicModel(k=k, seed=seed).fit(emb, dtm)
    return _result_from(model, "cluster", k, dtm.vocabulary.terms, seed)


def top_keywords(result: TopicModelResult, n: int) -> TopicKeywords:
    """The n heaviest terms per topic, descending; ties break lexicographically."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > len(result.terms):
        raise ValueError(
            f"n ({n}) exceeds vocabulary size ({len(result.terms)})"
        )
    topics = []
    for k in range(result.k):
        weights = result.topic_term[k]
        order = sorted(range(len(result.terms)),
                       key=lambda j: (-weights[j], result.terms[j]))[:n]
        topics.append([(result.terms[j], float(weights[j])) for j in order])
    return TopicKeywords(topics=topics)


def assign_topics(result: TopicModelResult) -> np.ndarray:
    """Hard per-document topic ids (argmax, lowest index on ties)."""
    return result.doc_topic.argmax(axis=1)


def _fmt(value) -> str:
    """JSON text with floats at 17 significant digits (exact round-trip)."""
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        items = (f"{json.dumps(k)}: {_fmt(v)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    return json.dumps(value)


def model_json(result: TopicModelResult, extra: dict | None = None) -> str:
    """The single-JSON-document serialization of a fitted model."""
    doc = {
        "model_kind": result.model_kind,
        "K": result.k,
        "seed": result.seed,
        "vocabulary": result.terms,
        "topic_term": [[float(x) for x in row] for row in result.topic_term],
        "doc_topic": [[float(x) for x in row] for row in result.doc_topic],
        "assignments": [int(a) for a in result.assignments],
    }
    if extra:
        doc.update(extra)
    return _fmt(doc) + "\n"


def save_model(result: TopicModelResult, path: str | Path,
               extra: dict | None = None) -> None:
    Path(path).write_text(model_json(result, extra), encoding="utf-8")


def load_model(path: str | Path) -> TopicModelResult:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    result = TopicModelResult(
        model_kind=doc["model_kind"],
        k=int(doc["K"]),
        doc_topic=np.array(doc["doc_topic"], dtype=np.float64),
        topic_term=np.array(doc["topic_term"], dtype=np.float64),
        assignments=np.array(doc["assignments"], dtype=np.int64),
        terms=[str(t) for t in doc["vocabulary"]],
        seed=int(doc["seed"]),
    )
    result.validate()
    return result
