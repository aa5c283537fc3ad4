"""Topic coherence scoring, the K sweep, and best-score comparison math."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

from .corpus import Corpus, build_doc_term_matrix
from .embedding import EmbeddingMatrix, lsa_embed
from .seeding import derive_seed
from .topics import (
    TopicKeywords,
    fit_cluster_topics,
    fit_lda,
    fit_nmf,
    top_keywords,
)

MODEL_KINDS = ("lda", "nmf", "cluster")


@dataclass
class CoherenceConfig:
    """Coherence measure settings.

    ``npmi`` scores keyword pairs from boolean sliding windows of length
    ``window`` (a document shorter than the window is a single window);
    ``umass`` uses document co-occurrence counts.
    """

    measure: str = "npmi"
    top_n: int = 10
    window: int = 10
    epsilon: float = 1e-12

    def __post_init__(self):
        if self.measure not in ("npmi", "umass"):
            raise ValueError(f"unknown coherence measure: {self.measure!r}")
        if self.top_n < 2:
            raise ValueError("top_n must be >= 2")
        if self.window < 2:
            raise ValueError("window must be >= 2")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")


@dataclass
class SweepRow:
    model_kind: str
    k: int
    hyperparams: dict
    score: float


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)


def _doc_windows(tokens: list[str], window: int) -> list[set[str]]:
    if len(tokens) <= window:
        return [set(tokens)] if tokens else []
    return [set(tokens[i:i + window]) for i in range(len(tokens) - window + 1)]


def _occurrence_counts(
    units: list[set[str]], words: set[str], pairs: set[tuple[str, str]]
) -> tuple[dict[str, int], dict[tuple[str, str], int]]:
    single = dict.fromkeys(words, 0)
    joint = dict.fromkeys(pairs, 0)
    for unit in units:
        present = words & unit
        for w in present:
            single[w] += 1
        for a, b in pairs:
            if a in present and b in present:
                joint[(a, b)] += 1
    return single, joint


def _npmi_pair(p_i: float, p_j: float, p_ij: float, epsilon: float) -> float:
    if p_ij >= 1.0:
        # both words in every window: perfect association by continuity
        return 1.0
    if p_ij > 0.0:
        return math.log(p_ij / (p_i * p_j)) / -math.log(p_ij)
    if p_i == 0.0 or p_j == 0.0:
        return -1.0
    value = math.log(epsilon / (p_i * p_j)) / -math.log(epsilon)
    return max(-1.0, min(1.0, value))


def coherence_score(
    keywords: TopicKeywords, corpus: Corpus, config: CoherenceConfig
) -> float:
    """Mean per-topic coherence of the keyword lists over the corpus.

    ``npmi``: per topic, the mean NPMI over all keyword pairs (i < j);
    ``umass``: per topic, the sum over pairs of
    ``ln((D(w_i, w_j) + 1) / D(w_i))``.  A keyword absent from the corpus
    contributes the epsilon-smoothed value and emits a warning.
    """
    word_lists = keywords.word_lists()
    if not word_lists or any(not words for words in word_lists):
        raise ValueError("empty keyword list")

    all_words = set().union(*word_lists)
    all_pairs = set()
    for words in word_lists:
        for a, b in combinations(words, 2):
            all_pairs.add((a, b))

    if config.measure == "npmi":
        units = []
        for doc in corpus.documents:
            units.extend(_doc_windows(doc.tokens, config.window))
    else:
        units = [set(doc.tokens) for doc in corpus.documents if doc.tokens]
    if not units:
        raise ValueError("corpus has no tokens to score against")
    single, joint = _occurrence_counts(units, all_words, all_pairs)

    missing = sorted(w for w in all_words if single[w] == 0)
    if missing:
        warnings.warn(
            f"keywords absent from corpus, using epsilon smoothing: {missing}",
            stacklevel=2,
        )

    n = len(units)
    topic_scores = []
    for words in word_lists:
        pair_values = []
        for a, b in combinations(words, 2):
            if config.measure == "npmi":
                pair_values.append(
                    _npmi_pair(single[a] / n, single[b] / n,
                               joint[(a, b)] / n, config.epsilon)
                )
            else:
                d_i = single[a]
                if d_i == 0:
                    pair_values.append(math.log(config.epsilon))
                else:
                    pair_values.append(math.log((joint[(a, b)] + 1) / d_i))
        if not pair_values:
            raise ValueError("a topic needs at least two keywords to score")
        if config.measure == "npmi":
            topic_scores.append(sum(pair_values) / len(pair_values))
        else:
            topic_scores.append(sum(pair_values))
    return sum(topic_scores) / len(topic_scores)


def sweep(
    corpus: Corpus,
    models,
    k_min: int,
    k_max: int,
    step: int,
    config: CoherenceConfig | None = None,
    seed: int = 0,
    embeddings: EmbeddingMatrix | None = None,
    min_df: int = 1,
    lda_params: dict | None = None,
    nmf_params: dict | None = None,
) -> SweepResult:
    """Fit each (model, K) over the K grid and record its coherence.

    Each configuration gets the derived seed
    ``seed XOR stable-hash(model, K)`` so the result is independent of
    execution order; rows come back sorted by (model, K).
    """
    if not 1 <= k_min <= k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    if step < 1:
        raise ValueError("step must be >= 1")
    config = config or CoherenceConfig()
    models = list(models)
    for kind in models:
        if kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind: {kind!r}")
    lda_params = dict(lda_params or {})
    nmf_params = dict(nmf_params or {})

    dtm_count = build_doc_term_matrix(corpus, weighting="count", min_df=min_df)
    dtm_tfidf = None
    if "nmf" in models or ("cluster" in models and embeddings is None):
        dtm_tfidf = build_doc_term_matrix(corpus, weighting="tfidf", min_df=min_df)
    emb = embeddings
    if "cluster" in models and emb is None:
        dim = min(64, min(dtm_tfidf.rows, dtm_tfidf.cols))
        emb = lsa_embed(dtm_tfidf, dim=dim, seed=derive_seed(seed, "lsa"))

    rows = []
    for kind in sorted(set(models)):
        for k in range(k_min, k_max + 1, step):
            fit_seed = derive_seed(seed, kind, k)
            try:
                if kind == "lda":
                    params = dict(lda_params)
                    result = fit_lda(dtm_count, k, seed=fit_seed, **params)
                elif kind == "nmf":
                    params = dict(nmf_params)
                    result = fit_nmf(dtm_tfidf, k, seed=fit_seed, **params)
                else:
                    params = {}
                    result = fit_cluster_topics(emb, dtm_count, k, seed=fit_seed)
                keywords = top_keywords(result, config.top_n)
                score = coherence_score(keywords, corpus, config)
            except ValueError as exc:
                raise ValueError(f"model={kind} k={k}: {exc}") from exc
            rows.append(SweepRow(model_kind=kind, k=k, hyperparams=params, score=score))
    rows.sort(key=lambda r: (r.model_kind, r.k))
    return SweepResult(rows=rows)


def sweep_to_csv(result: SweepResult, measure: str) -> str:
    """Sweep rows as CSV text: header ``model,k,measure,score``, 4-decimal scores."""
    lines = ["model,k,measure,score"]
    for row in result.rows:
        lines.append(f"{row.model_kind},{row.k},{measure},{row.score:.4f}")
    return "\n".join(lines) + "\n"


def best_scores(result: SweepResult) -> dict[str, float]:
    """Best coherence per model kind."""
    best: dict[str, float] = {}
    for row in result.rows:
        if row.model_kind not in best or row.score > best[row.model_kind]:
            best[row.model_kind] = row.score
    return best


def enhancement(cluster_best: float, lda_best: float, nmf_best: float) -> float:
    """Relative gain of the cluster model's best coherence over the better
    of the LDA/NMF baselines, as a raw percentage (round for display)."""
    baseline = max(lda_best, nmf_best)
    if min(cluster_best, lda_best, nmf_best) <= 0:
        raise ValueError("coherence inputs must be > 0")
    return (cluster_best - baseline) / baseline * 100.0
