"""Corpus loading, text preprocessing, and document-term matrices."""

from __future__ import annotations

import csv
import json
import string
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .stemming import porter_stem

_EMOJI_RANGES = ((0x1F000, 0x1FAFF), (0x2600, 0x27BF))
_VARIATION_SELECTOR = 0xFE0F
_SYMBOL_CATEGORIES = frozenset({"So", "Sk"})


def _is_emoji(ch: str) -> bool:
    cp = ord(ch)
    if cp == _VARIATION_SELECTOR:
        return True
    if any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES):
        return True
    return unicodedata.category(ch) in _SYMBOL_CATEGORIES


def _is_punct(ch: str) -> bool:
    return ch in string.punctuation or unicodedata.category(ch).startswith("P")


def _clean_token(token: str) -> str:
    """Apply the per-character filters to one stopword-file entry."""
    out = []
    for i, ch in enumerate(token.lower()):
        if i == 0 and ch in "#@":
            out.append(ch)
            continue
        if ch.isdigit() or _is_emoji(ch) or _is_punct(ch):
            continue
        out.append(ch)
    return "".join(out)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line stopword file.

    Entries are normalized through the same character filters as the
    corpus text, so list entries like "don't" match the token "dont".
    """
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            cleaned = _clean_token(line.strip())
            if cleaned:
                words.add(cleaned)
    return frozenset(words)


_DEFAULT_STOPWORDS: frozenset[str] | None = None


def default_stopwords() -> frozenset[str]:
    """The English stopword list vendored with the package."""
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        ref = resources.files("topicmetrics").joinpath("data/stopwords.txt")
        words = set()
        for line in ref.read_text(encoding="utf-8").splitlines():
            cleaned = _clean_token(line.strip())
            if cleaned:
                words.add(cleaned)
        _DEFAULT_STOPWORDS = frozenset(words)
    return _DEFAULT_STOPWORDS


def preprocess_text(
    raw: str,
    *,
    stem: bool = True,
    stopword_list: frozenset[str] | set[str] | None = None,
) -> list[str]:
    """Tokenize one text the way the pipeline expects.

    Lowercases, drops digits, punctuation (a '#' or '@' survives only as
    the first character of a whitespace-delimited word), and emoji, splits
    on whitespace, removes stopwords, then Porter-stems when ``stem``.
    Empty input yields an empty list.
    """
    if stopword_list is None:
        stopword_list = default_stopwords()
    out: list[str] = []
    at_word_start = True
    for ch in raw.lower():
        if ch.isspace():
            out.append(" ")
            at_word_start = True
            continue
        keep_prefix = at_word_start and ch in "#@"
        at_word_start = False
        if keep_prefix:
            out.append(ch)
            continue
        if ch.isdigit() or _is_emoji(ch) or _is_punct(ch):
            continue
        out.append(ch)
    tokens = [t for t in "".join(out).split() if t.lstrip("#@")]
    tokens = [t for t in tokens if t not in stopword_list]
    if stem:
        tokens = [porter_stem(t) for t in tokens]
    return [t for t in tokens if t]


@dataclass
class Document:
    """One text with optional stance (0/1) and sentiment (in [-1, 1])."""

    id: str
    raw_text: str
    tokens: list[str] = field(default_factory=list)
    stance: int | None = None
    sentiment: float | None = None


@dataclass
class Vocabulary:
    """Ordered term list with index and document frequencies."""

    terms: list[str]
    index: dict[str, int]
    doc_freq: dict[str, int]

    @classmethod
    def from_token_lists(
        cls, token_lists: Iterable[Sequence[str]], min_df: int = 1
    ) -> "Vocabulary":
        """Build a vocabulary in first-occurrence order, dropping terms seen
        in fewer than ``min_df`` documents."""
        if min_df < 1:
            raise ValueError("min_df must be >= 1")
        order: list[str] = []
        df: dict[str, int] = {}
        for tokens in token_lists:
            for term in dict.fromkeys(tokens):
                if term not in df:
                    order.append(term)
                    df[term] = 0
                df[term] += 1
        terms = [t for t in order if df[t] >= min_df]
        return cls(
            terms=terms,
            index={t: i for i, t in enumerate(terms)},
            doc_freq={t: df[t] for t in terms},
        )

    def __len__(self) -> int:
        return len(self.terms)


@dataclass
class Corpus:
    """Ordered documents plus their vocabulary.

    Document order is file order and stays fixed; a Corpus is treated as
    immutable after load + preprocess.
    """

    documents: list[Document]
    vocabulary: Vocabulary | None = None

    @property
    def n_docs(self) -> int:
        return len(self.documents)

    def token_lists(self) -> list[list[str]]:
        return [doc.tokens for doc in self.documents]


@dataclass
class DocTermMatrix:
    """Sparse nonnegative document x term matrix; row i is documents[i]."""

    matrix: sp.csr_matrix
    vocabulary: Vocabulary
    weighting: str  # "count" or "tfidf"

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def dense(self) -> np.ndarray:
        return np.asarray(self.matrix.todense(), dtype=np.float64)


@dataclass
class CorpusStats:
    n_docs: int
    avg_tokens: float  # exact mean; round to 1 decimal for display


def _parse_stance(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"stance must be the integer 0 or 1 {where}")
    if value not in (0, 1):
        raise ValueError(f"stance out of range {where}")
    return value


def _parse_sentiment(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"sentiment must be a number {where}")
    value = float(value)
    if not -1.0 <= value <= 1.0:
        raise ValueError(f"sentiment out of range {where}")
    return value


def _load_jsonl(path: Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"at line {lineno} of {path}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed JSON {where}: {exc}") from exc
            if not isinstance(record, dict) or "text" not in record:
                raise ValueError(f"record without text field {where}")
            doc = Document(
                id=str(record.get("id", f"doc-{lineno}")),
                raw_text=str(record["text"]),
            )
            if record.get("stance") is not None:
                doc.stance = _parse_stance(record["stance"], where)
            if record.get("sentiment") is not None:
                doc.sentiment = _parse_sentiment(record["sentiment"], where)
            docs.append(doc)
    return docs


def _load_csv(path: Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames:
            raise ValueError(f"{path}: CSV must have a header with a text column")
        for lineno, row in enumerate(reader, start=2):
            where = f"at line {lineno} of {path}"
            if row.get("text") is None:
                raise ValueError(f"record without text field {where}")
            doc = Document(
                id=(row.get("id") or f"doc-{lineno}"), raw_text=row["text"]
            )
            stance_cell = (row.get("stance") or "").strip()
            if stance_cell:
                try:
                    stance = int(stance_cell)
                except ValueError as exc:
                    raise ValueError(f"stance must be the integer 0 or 1 {where}") from exc
                doc.stance = _parse_stance(stance, where)
            sentiment_cell = (row.get("sentiment") or "").strip()
            if sentiment_cell:
                try:
                    sentiment = float(sentiment_cell)
                except ValueError as exc:
                    raise ValueError(f"sentiment must be a number {where}") from exc
                doc.sentiment = _parse_sentiment(sentiment, where)
            docs.append(doc)
    return docs


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load a corpus file; documents keep file order, tokens start empty."""
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"corpus file not found: {path}")
    if format == "jsonl":
        docs = _load_jsonl(path)
    elif format == "csv":
        docs = _load_csv(path)
    else:
        raise ValueError(f"unknown corpus format: {format!r}")
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise ValueError(f"duplicate document id {doc.id!r} in {path}")
        seen.add(doc.id)
    return Corpus(documents=docs)


def preprocess_corpus(
    corpus: Corpus,
    *,
    stem: bool = True,
    stopword_list: frozenset[str] | set[str] | None = None,
) -> Corpus:
    """Tokenize every document and attach the full vocabulary."""
    docs = [
        Document(
            id=d.id,
            raw_text=d.raw_text,
            tokens=preprocess_text(d.raw_text, stem=stem, stopword_list=stopword_list),
            stance=d.stance,
            sentiment=d.sentiment,
        )
        for d in corpus.documents
    ]
    vocab = Vocabulary.from_token_lists((d.tokens for d in docs), min_df=1)
    return Corpus(documents=docs, vocabulary=vocab)


def build_doc_term_matrix(
    corpus: Corpus, weighting: str = "count", min_df: int = 1
) -> DocTermMatrix:
    """Build the bag-of-words matrix over the corpus token lists.

    ``count`` stores raw term counts.  ``tfidf`` stores
    ``tf * (1 + ln((1 + N) / (1 + df)))`` and L2-normalizes each row
    (all-zero rows are left as zero).
    """
    if weighting not in ("count", "tfidf"):
        raise ValueError(f"unknown weighting: {weighting!r}")
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    token_lists = corpus.token_lists()
    vocab = Vocabulary.from_token_lists(token_lists, min_df=min_df)
    if not vocab.terms:
        raise ValueError("empty vocabulary after min_df filtering")

    rows, cols, data = [], [], []
    for i, tokens in enumerate(token_lists):
        counts: dict[int, int] = {}
        for tok in tokens:
            j = vocab.index.get(tok)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        for j in sorted(counts):
            rows.append(i)
            cols.append(j)
            data.append(float(counts[j]))
    matrix = sp.csr_matrix(
        (data, (rows, cols)), shape=(len(token_lists), len(vocab)), dtype=np.float64
    )

    if weighting == "tfidf":
        n = len(token_lists)
        df = np.array([vocab.doc_freq[t] for t in vocab.terms], dtype=np.float64)
        idf = 1.0 + np.log((1.0 + n) / (1.0 + df))
        matrix = matrix.multiply(idf[np.newaxis, :]).tocsr()
        norms = np.sqrt(matrix.multiply(matrix).sum(axis=1)).A1
        scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        matrix = sp.diags(scale) @ matrix
        matrix = matrix.tocsr()
    matrix.sort_indices()
    return DocTermMatrix(matrix=matrix, vocabulary=vocab, weighting=weighting)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Document count and mean tokens per document."""
    if not corpus.documents:
        raise ValueError("empty corpus")
    total = sum(len(d.tokens) for d in corpus.documents)
    return CorpusStats(n_docs=len(corpus.documents), avg_tokens=total / len(corpus.documents))
