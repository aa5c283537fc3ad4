"""Feature matrix construction tests."""

import numpy as np
import pytest

from topicmetrics.features import (
    combine_features,
    load_lexicon,
    one_hot_topics,
    sentiment_features,
)

from synthdata import corpus_from_tokens


class TestOneHot:
    def test_example(self):
        fm = one_hot_topics([0, 2], 3)
        assert fm.values.tolist() == [[1, 0, 0], [0, 0, 1]]
        assert fm.column_labels == ["topic_0", "topic_1", "topic_2"]
        assert fm.kind == "topic"

    def test_k1_all_ones(self):
        fm = one_hot_topics([0, 0, 0], 1)
        assert fm.values.tolist() == [[1.0], [1.0], [1.0]]

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="topic ids"):
            one_hot_topics([3], 3)

    def test_row_and_column_sums(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            k = int(rng.integers(1, 8))
            ids = rng.integers(0, k, size=rng.integers(1, 30))
            fm = one_hot_topics(ids, k)
            assert np.all(fm.values.sum(axis=1) == 1.0)
            assert fm.values.sum() == len(ids)
            assert np.array_equal(fm.values.argmax(axis=1), ids)


class TestSentiment:
    def test_column_passthrough(self):
        corpus = corpus_from_tokens([["x"], ["y"]], sentiments=[-0.2, 0.9])
        fm = sentiment_features(corpus, source="column")
        assert fm.values.tolist() == [[-0.2], [0.9]]
        assert fm.kind == "sentiment"

    def test_missing_column_value_reports_id(self):
        corpus = corpus_from_tokens([["x"], ["y"]], sentiments=[0.5, 0.0])
        corpus.documents[1].sentiment = None
        with pytest.raises(ValueError, match="d1"):
            sentiment_features(corpus, source="column")

    def test_lexicon_single_token(self):
        corpus = corpus_from_tokens([["good"]])
        fm = sentiment_features(corpus, source="lexicon", lexicon={"good": 1.0})
        assert fm.values.tolist() == [[1.0]]

    def test_lexicon_mean_score(self):
        corpus = corpus_from_tokens([["good", "bad", "bad"]])
        fm = sentiment_features(
            corpus, source="lexicon", lexicon={"good": 1.0, "bad": -1.0}
        )
        assert fm.values[0, 0] == pytest.approx(-1.0 / 3.0, abs=1e-12)

    def test_lexicon_empty_doc_scores_zero(self):
        corpus = corpus_from_tokens([[]])
        fm = sentiment_features(corpus, source="lexicon", lexicon={"good": 1.0})
        assert fm.values.tolist() == [[0.0]]

    def test_lexicon_file(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("good\t0.8\nbad\t-0.5\n", encoding="utf-8")
        assert load_lexicon(path) == {"good": 0.8, "bad": -0.5}
        with pytest.raises(ValueError, match="polarity out of range"):
            bad = tmp_path / "bad.tsv"
            bad.write_text("huge\t2.0\n", encoding="utf-8")
            load_lexicon(bad)


class TestCombine:
    def test_concatenation(self):
        topic = one_hot_topics([0], 2)
        corpus = corpus_from_tokens([["x"]], sentiments=[0.5])
        sent = sentiment_features(corpus)
        combined = combine_features(topic, sent)
        assert combined.values.tolist() == [[1.0, 0.0, 0.5]]
        assert combined.kind == "combined"
        assert combined.column_labels == ["topic_0", "topic_1", "sentiment"]

    def test_mismatched_rows_rejected(self):
        topic = one_hot_topics([0, 1], 2)
        corpus = corpus_from_tokens([["x"]], sentiments=[0.5])
        sent = sentiment_features(corpus)
        with pytest.raises(ValueError, match="row-count mismatch"):
            combine_features(topic, sent)

    def test_lossless_slicing(self):
        rng = np.random.default_rng(3)
        k = 4
        ids = rng.integers(0, k, size=12)
        topic = one_hot_topics(ids, k)
        corpus = corpus_from_tokens(
            [["x"]] * 12, sentiments=rng.uniform(-1, 1, size=12)
        )
        sent = sentiment_features(corpus)
        combined = combine_features(topic, sent)
        assert np.array_equal(combined.values[:, :k], topic.values)
        assert np.array_equal(combined.values[:, k:], sent.values)
