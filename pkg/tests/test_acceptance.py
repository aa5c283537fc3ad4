"""Acceptance criteria, one test per criterion with its stated tolerance
and runtime budget."""

import json
import time

import numpy as np
import pytest

from topicmetrics.classify import (
    ClassifierSpec,
    cross_validate,
    f1_score,
    logistic_gradient,
    logistic_loss,
)
from topicmetrics.coherence import CoherenceConfig, coherence_score, enhancement
from topicmetrics.corpus import build_doc_term_matrix
from topicmetrics.embedding import lsa_embed
from topicmetrics.features import combine_features, one_hot_topics, sentiment_features
from topicmetrics.report import improvement, point_biserial
from topicmetrics.topics import (
    GibbsLDA,
    MultiplicativeNMF,
    TopicKeywords,
    c_tf_idf,
    fit_cluster_topics,
    fit_lda,
)

from synthdata import (
    corpus_from_tokens,
    make_planted_topics_corpus,
    make_stance_corpus,
)
from test_topics import _dtm


def test_table_arithmetic_reproduction():
    start = time.perf_counter()
    # Best-coherence table: (cluster, lda, nmf) -> enhancement %
    assert abs(enhancement(0.7539, 0.4006, 0.6329) - 19.12) <= 0.005
    assert abs(enhancement(0.9431, 0.4518, 0.6116) - 54.20) <= 0.005
    assert abs(enhancement(0.5113, 0.4216, 0.4367) - 17.08) <= 0.005
    # F1 tables: improvement of topic / combined over sentiment
    assert abs(improvement(0.9347, 0.9281) - 0.71) <= 0.005
    assert abs(improvement(0.8373, 0.7039) - 18.95) <= 0.005
    assert abs(improvement(0.6030, 0.5705) - 5.70) <= 0.005
    assert abs(improvement(0.9366, 0.9281) - 0.92) <= 0.005
    assert abs(improvement(0.8354, 0.7039) - 18.68) <= 0.005
    assert abs(improvement(0.6516, 0.5705) - 14.22) <= 0.005
    assert time.perf_counter() - start < 1.0


def _feature_sets(corpus, k_topics, seed):
    dtm_count = build_doc_term_matrix(corpus, "count")
    dtm_tfidf = build_doc_term_matrix(corpus, "tfidf")
    dim = min(32, min(dtm_tfidf.rows, dtm_tfidf.cols))
    emb = lsa_embed(dtm_tfidf, dim=dim, seed=seed)
    result = fit_cluster_topics(emb, dtm_count, k_topics, seed=seed)
    topic_fm = one_hot_topics(result.assignments, result.k)
    sent_fm = sentiment_features(corpus, source="column")
    return topic_fm, sent_fm, combine_features(topic_fm, sent_fm)


def _cv_mean(fm, y, seed):
    spec = ClassifierSpec(kind="logistic")
    return cross_validate(fm, y, spec, folds=10, seed=seed).mean


def test_synthetic_kc_analog_topic_beats_sentiment():
    start = time.perf_counter()
    wins = 0
    for i in range(20):
        corpus = make_stance_corpus(
            seed=1000 + i, n_docs=160, words_per_class=25,
            shared_words=0, sentiment="independent",
        )
        y = np.array([d.stance for d in corpus.documents])
        s = np.array([d.sentiment for d in corpus.documents])
        assert abs(point_biserial(y, s)) < 0.1  # weak link, by construction
        topic_fm, sent_fm, _ = _feature_sets(corpus, k_topics=10, seed=i)
        if _cv_mean(topic_fm, y, seed=i) >= _cv_mean(sent_fm, y, seed=i) + 0.15:
            wins += 1
    assert wins >= 19  # >= 95% of 20 seeds
    assert time.perf_counter() - start < 60.0


def test_synthetic_wm_motn_analog_combined_competitive():
    start = time.perf_counter()
    wins = 0
    for i in range(20):
        # moderate topic signal (mostly shared vocabulary) plus planted r~0.5
        corpus = make_stance_corpus(
            seed=2000 + i, n_docs=160, words_per_class=5,
            shared_words=40, sentiment="correlated", target_r=0.5,
        )
        y = np.array([d.stance for d in corpus.documents])
        topic_fm, sent_fm, combined_fm = _feature_sets(corpus, k_topics=10, seed=i)
        f1_topic = _cv_mean(topic_fm, y, seed=i)
        f1_sent = _cv_mean(sent_fm, y, seed=i)
        f1_combined = _cv_mean(combined_fm, y, seed=i)
        if f1_combined >= max(f1_topic, f1_sent) - 0.01:
            wins += 1
    assert wins >= 18  # >= 90% of 20 seeds
    assert time.perf_counter() - start < 60.0


def test_nmf_objective_monotonicity_200_instances():
    start = time.perf_counter()
    rng = np.random.default_rng(31)
    for _ in range(200):
        n = int(rng.integers(2, 31))
        m = int(rng.integers(2, 31))
        k = int(rng.integers(1, 6))
        v = rng.random((n, m))
        model = MultiplicativeNMF(k=k, iterations=25, tol=0.0,
                                  seed=int(rng.integers(1 << 31))).fit(_dtm(v, "tfidf"))
        assert (np.diff(model.objective_history_) <= 1e-9).all()
    assert time.perf_counter() - start < 10.0


def test_lda_count_conservation_and_degeneracies():
    start = time.perf_counter()
    rng = np.random.default_rng(17)
    groups = [["aa", "bb"], ["cc", "dd"]]
    token_lists = []
    for vocab in groups:
        for _ in range(8):
            token_lists.append(list(rng.choice(vocab, size=12)))
    corpus = corpus_from_tokens(token_lists)
    dtm = build_doc_term_matrix(corpus, "count")

    # count conservation asserted inside the sampler after every sweep
    GibbsLDA(k=3, alpha=0.5, beta=0.1, iterations=30, seed=2,
             check_counts=True).fit(dtm)

    # K=1 degeneracy
    single = fit_lda(dtm, 1, iterations=2, seed=0)
    assert np.array_equal(single.assignments, np.zeros(len(token_lists)))
    assert np.allclose(single.doc_topic, 1.0)

    # disjoint-vocabulary separation at a fixed seed
    result = fit_lda(dtm, 2, alpha=0.1, beta=0.1, iterations=500, seed=11)
    assert (result.doc_topic.max(axis=1) >= 0.8).all()
    first, second = result.assignments[:8], result.assignments[8:]
    assert len(set(first)) == 1 and len(set(second)) == 1
    assert first[0] != second[0]
    assert time.perf_counter() - start < 30.0


def test_logistic_gradient_vs_central_differences():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    h = 1e-5
    for _ in range(100):
        n = int(rng.integers(2, 15))
        p = int(rng.integers(1, 6))
        x = rng.normal(size=(n, p))
        y = rng.integers(0, 2, size=n).astype(np.float64)
        w = rng.normal(size=p)
        b = float(rng.normal())
        l2 = float(rng.uniform(0.0, 2.0))
        grad_w, grad_b = logistic_gradient(w, b, x, y, l2)
        flat = np.append(grad_w, grad_b)
        fd = np.empty(p + 1)
        for j in range(p):
            e = np.zeros(p)
            e[j] = h
            fd[j] = (logistic_loss(w + e, b, x, y, l2)
                     - logistic_loss(w - e, b, x, y, l2)) / (2 * h)
        fd[p] = (logistic_loss(w, b + h, x, y, l2)
                 - logistic_loss(w, b - h, x, y, l2)) / (2 * h)
        denom = np.maximum(np.abs(fd), 1e-8)
        assert (np.abs(flat - fd) / denom < 1e-4).all()
    assert time.perf_counter() - start < 5.0


def test_oracle_equivalence_brute_force():
    start = time.perf_counter()
    rng = np.random.default_rng(90)

    # f1_score vs confusion-matrix arithmetic
    for _ in range(1000):
        n = int(rng.integers(1, 20))
        yt = rng.integers(0, 2, size=n)
        yp = rng.integers(0, 2, size=n)
        tp = int(((yt == 1) & (yp == 1)).sum())
        fp = int(((yt == 0) & (yp == 1)).sum())
        fn = int(((yt == 1) & (yp == 0)).sum())
        expected = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
        assert abs(f1_score(yt, yp) - expected) <= 1e-12

    # one_hot_topics vs per-entry definition
    for _ in range(1000):
        k = int(rng.integers(1, 7))
        ids = rng.integers(0, k, size=int(rng.integers(1, 12)))
        values = one_hot_topics(ids, k).values
        for i, a in enumerate(ids):
            for j in range(k):
                assert values[i, j] == (1.0 if j == a else 0.0)

    # point_biserial vs numpy's Pearson implementation
    done = 0
    while done < 1000:
        n = int(rng.integers(3, 25))
        y = rng.integers(0, 2, size=n)
        s = rng.normal(size=n)
        if y.min() == y.max() or np.ptp(s) == 0:
            continue
        expected = np.corrcoef(y.astype(float), s)[0, 1]
        assert abs(point_biserial(y, s) - expected) <= 1e-12
        done += 1

    # c_tf_idf vs raw token recount
    words = [f"q{c}" for c in "abcdefgh"]
    for _ in range(1000):
        n_docs = int(rng.integers(2, 6))
        n_classes = int(rng.integers(1, n_docs + 1))
        classes = rng.integers(0, n_classes, size=n_docs)
        classes[:n_classes] = np.arange(n_classes)
        token_lists = [
            list(rng.choice(words, size=int(rng.integers(1, 8))))
            for _ in range(n_docs)
        ]
        corpus = corpus_from_tokens(token_lists)
        dtm = build_doc_term_matrix(corpus, "count")
        weights = c_tf_idf(dtm, classes, n_classes)
        all_tokens = [t for tokens in token_lists for t in tokens]
        avg = len(all_tokens) / n_classes
        for c in range(n_classes):
            class_tokens = [
                t for i, tokens in enumerate(token_lists)
                if classes[i] == c for t in tokens
            ]
            for j, term in enumerate(dtm.vocabulary.terms):
                tf = class_tokens.count(term)
                f_t = all_tokens.count(term)
                expected = tf * np.log(1.0 + avg / f_t) if f_t else 0.0
                assert abs(weights[c, j] - expected) <= 1e-9
    assert time.perf_counter() - start < 10.0


def test_coherence_ordering_and_perfect_npmi():
    start = time.perf_counter()

    # perfect co-occurrence: p(ab)=p(a)=p(b)=0.5 -> exactly 1.0
    corpus = corpus_from_tokens([["alpha", "bravo"], ["charlie"]])
    keywords = TopicKeywords(topics=[[("alpha", 1.0), ("bravo", 1.0)]])
    assert coherence_score(keywords, corpus, CoherenceConfig(measure="npmi")) == 1.0

    rng = np.random.default_rng(7)
    config = CoherenceConfig(measure="npmi", top_n=4)
    wins = 0
    for seed in range(100):
        planted, themes = make_planted_topics_corpus(seed=seed)
        true_sets = [theme[:4] for theme in themes]
        pool = [w for theme in themes for w in theme]
        random_sets = [
            list(rng.choice(pool, size=4, replace=False)) for _ in themes
        ]
        true_kw = TopicKeywords(
            topics=[[(w, 1.0) for w in ws] for ws in true_sets]
        )
        rand_kw = TopicKeywords(
            topics=[[(w, 1.0) for w in ws] for ws in random_sets]
        )
        if (coherence_score(true_kw, planted, config)
                > coherence_score(rand_kw, planted, config)):
            wins += 1
    assert wins >= 95
    assert time.perf_counter() - start < 30.0


def test_end_to_end_determinism(tmp_path, monkeypatch):
    from topicmetrics.cli import run
    from test_cli import write_corpus_jsonl

    start = time.perf_counter()

    def pipeline(workdir):
        monkeypatch.chdir(workdir)
        write_corpus_jsonl(workdir / "corpus.jsonl", seed=5, n_docs=80)
        assert run(["prep", "--input", "corpus.jsonl",
                    "--output", "tokenized.jsonl", "--seed", "7"]) == 0
        assert run(["embed", "lsa", "--input", "tokenized.jsonl",
                    "--output", "docs.emb1", "--dim", "16", "--seed", "7"]) == 0
        assert run(["topics", "fit", "--input", "tokenized.jsonl",
                    "--model", "cluster", "--k", "8",
                    "--embeddings", "docs.emb1",
                    "--output", "model.json", "--seed", "7"]) == 0
        for kind in ("topic", "sentiment", "combined"):
            argv = ["classify", "--input", "tokenized.jsonl",
                    "--features", kind, "--classifier", "logistic",
                    "--folds", "10", "--output", f"{kind}.json",
                    "--seed", "7", "--dataset", "synth"]
            if kind != "sentiment":
                argv += ["--model", "model.json"]
            assert run(argv) == 0
        assert run(["report",
                    "--results", "topic.json", "sentiment.json", "combined.json",
                    "--input", "tokenized.jsonl",
                    "--format", "markdown", "--output", "report.md",
                    "--seed", "7"]) == 0
        return (workdir / "report.md").read_bytes()

    run_a = tmp_path / "a"
    run_b = tmp_path / "b"
    run_a.mkdir()
    run_b.mkdir()
    report_a = pipeline(run_a)
    report_b = pipeline(run_b)
    assert report_a == report_b
    for name in ("topic.json", "sentiment.json", "combined.json", "model.json"):
        assert (run_a / name).read_bytes() == (run_b / name).read_bytes()
    assert time.perf_counter() - start < 60.0
