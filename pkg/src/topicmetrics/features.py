"""Feature matrices for stance classification: topic one-hots, sentiment,
and their concatenation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .validation import as_float_array

KINDS = ("topic", "sentiment", "combined")


@dataclass
class FeatureMatrix:
    """Dense document x feature matrix; row i aligns with documents[i]."""

    values: np.ndarray
    column_labels: list[str]
    kind: str

    def __post_init__(self):
        self.values = as_float_array(self.values, "feature values", ndim=2)
        if self.kind not in KINDS:
            raise ValueError(f"unknown feature kind: {self.kind!r}")
        if len(self.column_labels) != self.values.shape[1]:
            raise ValueError("column_labels must match the number of columns")
        if self.kind == "topic":
            if not np.all(np.isin(self.values, (0.0, 1.0))):
                raise ValueError("topic features must be 0/1")
            if self.values.size and not np.all(self.values.sum(axis=1) == 1.0):
                raise ValueError("topic feature rows must be one-hot")
        if self.kind == "sentiment":
            if self.values.shape[1] != 1:
                raise ValueError("sentiment features must have a single column")
            if self.values.size and (np.abs(self.values) > 1.0).any():
                raise ValueError("sentiment values must lie in [-1, 1]")

    @property
    def n_docs(self) -> int:
        return self.values.shape[0]


def one_hot_topics(assignments, k: int) -> FeatureMatrix:
    """Dummy-variable encoding of hard topic ids (all K columns kept)."""
    ids = np.asarray(assignments, dtype=np.int64)
    if ids.ndim != 1:
        raise ValueError("assignments must be one-dimensional")
    if ids.size and (ids.min() < 0 or ids.max() >= k):
        raise ValueError(f"topic ids must lie in [0, {k})")
    values = np.zeros((ids.size, k))
    values[np.arange(ids.size), ids] = 1.0
    return FeatureMatrix(
        values=values,
        column_labels=[f"topic_{j}" for j in range(k)],
        kind="topic",
    )


def load_lexicon(path: str | Path) -> dict[str, float]:
    """Read a ``token<TAB>polarity`` lexicon, polarities in [-1, 1]."""
    lexicon: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                token, polarity_text = line.split("\t")
                polarity = float(polarity_text)
            except ValueError as exc:
                raise ValueError(
                    f"malformed lexicon line {lineno}: {line!r}"
                ) from exc
            if not -1.0 <= polarity <= 1.0:
                raise ValueError(
                    f"lexicon polarity out of range at line {lineno}: {polarity}"
                )
            lexicon[token] = polarity
    return lexicon


def sentiment_features(
    corpus: Corpus,
    source: str = "column",
    lexicon: dict[str, float] | str | Path | None = None,
) -> FeatureMatrix:
    """One sentiment score per document.

    ``column`` copies the stored per-document values (every document must
    have one).  ``lexicon`` scores tokens against a signed lexicon:
    ``sum(polarity of matched tokens) / max(1, n_tokens)``, clamped to
    [-1, 1]; intended for synthetic/demo corpora.
    """
    if source == "column":
        scores = []
        for doc in corpus.documents:
            if doc.sentiment is None:
                raise ValueError(f"document {doc.id!r} has no sentiment value")
            scores.append(doc.sentiment)
    elif source == "lexicon":
        if lexicon is None:
            raise ValueError("lexicon source needs a lexicon file or mapping")
        if isinstance(lexicon, (str, Path)):
            lexicon = load_lexicon(lexicon)
        scores = []
        for doc in corpus.documents:
            total = sum(lexicon.get(tok, 0.0) for tok in doc.tokens)
            score = total / max(1, len(doc.tokens))
            scores.append(min(1.0, max(-1.0, score)))
    else:
        raise ValueError(f"unknown sentiment source: {source!r}")
    values = np.array(scores, dtype=np.float64).reshape(-1, 1)
    return FeatureMatrix(values=values, column_labels=["sentiment"], kind="sentiment")


def combine_features(topic: FeatureMatrix, sent: FeatureMatrix) -> FeatureMatrix:
    """Concatenate topic columns (first) with the sentiment column."""
    if topic.kind != "topic" or sent.kind != "sentiment":
        raise ValueError("combine_features expects (topic, sentiment) matrices")
    if topic.n_docs != sent.n_docs:
        raise ValueError(
            f"row-count mismatch: topic has {topic.n_docs}, sentiment has {sent.n_docs}"
        )
    return FeatureMatrix(
        values=np.hstack([topic.values, sent.values]),
        column_labels=list(topic.column_labels) + list(sent.column_labels),
        kind="combined",
    )
