"""Command-line pipeline: prep, embed, topics fit, coherence sweep,
classify, report.

Every run is seeded and fully reproducible; the effective configuration is
echoed into each output artifact (a ``config`` key in JSON outputs, a
``# config: ...`` comment line in CSV/markdown, a ``.meta.json`` sidecar
for binary EMB1 files).  Stage seeds derive from the single ``--seed``
flag via a stable hash.  Diagnostics go to stderr; data goes to files.

Exit codes: 0 success, 1 usage error, 2 data/contract error.
"""

from __future__ import annotations

import argparse
import csv as csv_module
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .classify import ClassifierSpec, cross_validate, f1_score, fit_classifier, train_test_split
from .coherence import CoherenceConfig, SweepResult, SweepRow, best_scores, sweep, sweep_to_csv
from .corpus import (
    Corpus,
    Document,
    Vocabulary,
    build_doc_term_matrix,
    corpus_stats,
    load_corpus,
    load_stopwords,
    preprocess_corpus,
)
from .embedding import emb1_bytes, load_embeddings, lsa_embed
from .features import combine_features, one_hot_topics, sentiment_features
from .report import ComparisonRow, point_biserial, render_report
from .seeding import derive_seed
from .topics import fit_cluster_topics, fit_lda, fit_nmf, load_model, model_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 for usage problems, not argparse's 2
        raise UsageError(f"{self.prog}: {message}")


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_bytes(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config_dict(args: argparse.Namespace, subcommand: str) -> dict:
    skip = {"func"}
    config = {"tool": "topicmetrics", "version": __version__, "subcommand": subcommand}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        config[key] = str(value) if isinstance(value, Path) else value
    return config


def _log(message: str) -> None:
    print(message, file=sys.stderr)


# ---------------------------------------------------------------------------
# tokenized corpus interchange (prep output, downstream input)

def write_tokenized(corpus: Corpus, path: Path, config: dict) -> None:
    buf = io.StringIO()
    buf.write(json.dumps({"_config": config}, sort_keys=True) + "\n")
    for doc in corpus.documents:
        record = {"id": doc.id, "text": doc.raw_text, "tokens": doc.tokens}
        if doc.stance is not None:
            record["stance"] = doc.stance
        if doc.sentiment is not None:
            record["sentiment"] = doc.sentiment
        buf.write(json.dumps(record, sort_keys=True) + "\n")
    _atomic_write_text(path, buf.getvalue())


def read_tokenized(path: str | Path) -> Corpus:
    path = Path(path)
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed JSON at line {lineno} of {path}: {exc}") from exc
            if "_config" in record:
                continue
            docs.append(
                Document(
                    id=str(record["id"]),
                    raw_text=str(record.get("text", "")),
                    tokens=[str(t) for t in record.get("tokens", [])],
                    stance=record.get("stance"),
                    sentiment=record.get("sentiment"),
                )
            )
    if not docs:
        raise ValueError(f"{path}: no documents")
    vocab = Vocabulary.from_token_lists((d.tokens for d in docs), min_df=1)
    return Corpus(documents=docs, vocabulary=vocab)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_prep(args) -> int:
    corpus = load_corpus(args.input, format=args.format)
    stopword_list = load_stopwords(args.stopwords) if args.stopwords else None
    corpus = preprocess_corpus(corpus, stem=not args.no_stem, stopword_list=stopword_list)
    write_tokenized(corpus, Path(args.output), _config_dict(args, "prep"))
    stats = corpus_stats(corpus)
    _log(
        f"prep: wrote {stats.n_docs} documents to {args.output} "
        f"(avg {stats.avg_tokens:.1f} tokens)"
    )
    return 0


def _write_emb1_with_meta(emb, out: Path, config: dict) -> None:
    _atomic_write_bytes(out, emb1_bytes(emb))
    # EMB1 has no config slot, so the run config goes in a sidecar
    _atomic_write_text(
        out.with_suffix(out.suffix + ".meta.json"),
        json.dumps({"config": config}, sort_keys=True) + "\n",
    )


def _cmd_embed_lsa(args) -> int:
    corpus = read_tokenized(args.input)
    dtm = build_doc_term_matrix(corpus, weighting="tfidf", min_df=args.min_df)
    dim = min(args.dim, min(dtm.rows, dtm.cols))
    emb = lsa_embed(dtm, dim=dim, seed=derive_seed(args.seed, "lsa", dim))
    out = Path(args.output)
    _write_emb1_with_meta(emb, out, _config_dict(args, "embed lsa"))
    _log(f"embed lsa: wrote {emb.n_docs} x {emb.dim} embeddings to {out}")
    return 0


def _cmd_embed_load(args) -> int:
    corpus = read_tokenized(args.corpus)
    emb = load_embeddings(args.input, expected_n=corpus.n_docs)
    out = Path(args.output)
    _write_emb1_with_meta(emb, out, _config_dict(args, "embed load"))
    _log(f"embed load: validated {emb.n_docs} x {emb.dim} embeddings into {out}")
    return 0


def _cmd_topics_fit(args) -> int:
    corpus = read_tokenized(args.input)
    seed = derive_seed(args.seed, "topics", args.model, args.k)
    if args.model == "lda":
        dtm = build_doc_term_matrix(corpus, weighting="count", min_df=args.min_df)
        iterations = 1000 if args.iterations is None else args.iterations
        result = fit_lda(dtm, args.k, alpha=args.alpha, beta=args.beta,
                         iterations=iterations, seed=seed)
    elif args.model == "nmf":
        dtm = build_doc_term_matrix(corpus, weighting="tfidf", min_df=args.min_df)
        iterations = 200 if args.iterations is None else args.iterations
        result = fit_nmf(dtm, args.k, iterations=iterations,
                         tol=args.tol, seed=seed)
    else:
        dtm = build_doc_term_matrix(corpus, weighting="count", min_df=args.min_df)
        if args.embeddings:
            emb = load_embeddings(args.embeddings, expected_n=corpus.n_docs)
        else:
            tfidf = build_doc_term_matrix(corpus, weighting="tfidf", min_df=args.min_df)
            dim = min(args.embed_dim, min(tfidf.rows, tfidf.cols))
            emb = lsa_embed(tfidf, dim=dim, seed=derive_seed(args.seed, "lsa", dim))
        result = fit_cluster_topics(emb, dtm, args.k, seed=seed)
    text = model_json(result, extra={"config": _config_dict(args, "topics fit")})
    _atomic_write_text(Path(args.output), text)
    _log(f"topics fit: {args.model} K={args.k} saved to {args.output}")
    return 0


def _cmd_sweep(args) -> int:
    corpus = read_tokenized(args.input)
    config = CoherenceConfig(measure=args.measure, top_n=args.top_n, window=args.window)
    embeddings = None
    if args.embeddings:
        embeddings = load_embeddings(args.embeddings, expected_n=corpus.n_docs)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    lda_params = {"iterations": args.lda_iterations}
    nmf_params = {"iterations": args.nmf_iterations}
    result = sweep(
        corpus, models, args.k_min, args.k_max, args.step,
        config=config, seed=args.seed, embeddings=embeddings,
        min_df=args.min_df, lda_params=lda_params, nmf_params=nmf_params,
    )
    text = "# config: " + json.dumps(_config_dict(args, "coherence sweep"), sort_keys=True) + "\n"
    text += sweep_to_csv(result, args.measure)
    _atomic_write_text(Path(args.output), text)
    _log(f"coherence sweep: wrote {len(result.rows)} rows to {args.output}")
    return 0


def _stance_labels(corpus: Corpus) -> np.ndarray:
    missing = [d.id for d in corpus.documents if d.stance is None]
    if missing:
        raise ValueError(f"documents without stance labels: {missing[:5]}")
    return np.array([d.stance for d in corpus.documents], dtype=np.int64)


def _build_features(args, corpus: Corpus):
    sentiment_source = "lexicon" if args.lexicon else "column"
    if args.features in ("topic", "combined"):
        if not args.model_file:
            raise ValueError(f"--model is required for {args.features} features")
        model = load_model(args.model_file)
        if len(model.assignments) != corpus.n_docs:
            raise ValueError(
                f"model covers {len(model.assignments)} documents, corpus has {corpus.n_docs}"
            )
        topic_fm = one_hot_topics(model.assignments, model.k)
        if args.features == "topic":
            return topic_fm
        sent_fm = sentiment_features(corpus, source=sentiment_source, lexicon=args.lexicon)
        return combine_features(topic_fm, sent_fm)
    return sentiment_features(corpus, source=sentiment_source, lexicon=args.lexicon)


_CLASSIFIER_KINDS = {"logistic": "logistic", "knn": "knn", "svm": "linear_svm"}


def _cmd_classify(args) -> int:
    corpus = read_tokenized(args.input)
    y = _stance_labels(corpus)
    features = _build_features(args, corpus)
    spec = ClassifierSpec(kind=_CLASSIFIER_KINDS[args.classifier])

    train_idx, test_idx = train_test_split(
        corpus.n_docs, args.train_ratio, stratify_labels=y,
        seed=derive_seed(args.seed, "split"),
    )
    if len(test_idx) == 0:
        raise ValueError("train ratio leaves no held-out test documents")
    x = features.values
    cv = cross_validate(
        x[train_idx], y[train_idx], spec, folds=args.folds,
        seed=derive_seed(args.seed, "cv", args.features, args.classifier),
    )
    model = fit_classifier(spec, x[train_idx], y[train_idx],
                           seed=derive_seed(args.seed, "fit"))
    holdout = f1_score(y[test_idx], model.predict(x[test_idx]))

    dataset = args.dataset or Path(args.input).stem
    payload = {
        "dataset": dataset,
        "feature_kind": args.features,
        "classifier": args.classifier,
        "folds": cv.fold_f1,
        "mean": cv.mean,
        "std": cv.std,
        "seed": args.seed,
        "holdout_f1": holdout,
        "config": _config_dict(args, "classify"),
    }
    _atomic_write_text(Path(args.output), json.dumps(payload, sort_keys=True, indent=2) + "\n")
    _log(
        f"classify: {dataset}/{args.features}/{args.classifier} "
        f"cv mean F1 {cv.mean:.4f} (std {cv.std:.4f}), holdout F1 {holdout:.4f}"
    )
    return 0


def _read_sweep_csv(path: str | Path) -> SweepResult:
    rows = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    reader = csv_module.DictReader(lines)
    for record in reader:
        rows.append(
            SweepRow(
                model_kind=record["model"],
                k=int(record["k"]),
                hyperparams={},
                score=float(record["score"]),
            )
        )
    return SweepResult(rows=rows)


def _cmd_report(args) -> int:
    results = []
    for path in args.results:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        results.append(payload)

    sweep_result = _read_sweep_csv(args.sweep) if args.sweep else None
    coherence_best = None
    if sweep_result is not None:
        best = best_scores(sweep_result)
        coherence_best = best.get("cluster", max(best.values()) if best else None)

    corpus = read_tokenized(args.input)
    y = _stance_labels(corpus)
    sentiment_source = "lexicon" if args.lexicon else "column"
    sent = sentiment_features(corpus, source=sentiment_source, lexicon=args.lexicon)
    corr = point_biserial(y, sent.values[:, 0])

    by_dataset: dict[str, dict[str, dict]] = {}
    for payload in results:
        by_dataset.setdefault(payload["dataset"], {})[payload["feature_kind"]] = payload
    rows = []
    for dataset in sorted(by_dataset):
        cells = by_dataset[dataset]
        missing = {"topic", "sentiment", "combined"} - set(cells)
        if missing:
            raise ValueError(
                f"dataset {dataset!r} is missing results for: {sorted(missing)}"
            )
        rows.append(
            ComparisonRow(
                dataset=dataset,
                f1_topic=cells["topic"]["mean"],
                sd_topic=cells["topic"]["std"],
                f1_sentiment=cells["sentiment"]["mean"],
                sd_sentiment=cells["sentiment"]["std"],
                f1_combined=cells["combined"]["mean"],
                sd_combined=cells["combined"]["std"],
                corr=corr,
                coherence_best=coherence_best,
            )
        )
    rendered = render_report(rows, sweep=sweep_result, format=args.format)
    config_json = json.dumps(_config_dict(args, "report"), sort_keys=True)
    if args.format == "markdown":
        text = rendered.rstrip("\n") + f"\n\n<!-- config: {config_json} -->\n"
    else:
        text = f"# config: {config_json}\n" + rendered
    _atomic_write_text(Path(args.output), text)
    _log(f"report: wrote {len(rows)} dataset rows to {args.output}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="topicmetrics", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("prep", help="preprocess a corpus into tokenized JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--output", required=True)
    p.add_argument("--no-stem", action="store_true")
    p.add_argument("--stopwords", help="custom stopword file (one word per line)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_prep)

    p_embed = sub.add_parser("embed", help="produce or validate document embeddings")
    embed_sub = p_embed.add_subparsers(dest="method", required=True)

    p = embed_sub.add_parser("lsa", help="latent-semantic embeddings from TF-IDF")
    p.add_argument("--input", required=True, help="tokenized corpus JSONL")
    p.add_argument("--output", required=True, help="EMB1 output path")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_embed_lsa)

    p = embed_sub.add_parser("load", help="validate an external EMB1 file")
    p.add_argument("--input", required=True, help="EMB1 input path")
    p.add_argument("--corpus", required=True, help="tokenized corpus JSONL")
    p.add_argument("--output", required=True, help="validated EMB1 copy")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_embed_load)

    p_topics = sub.add_parser("topics", help="topic model operations")
    topics_sub = p_topics.add_subparsers(dest="action", required=True)
    p = topics_sub.add_parser("fit", help="fit a topic model and save it")
    p.add_argument("--input", required=True, help="tokenized corpus JSONL")
    p.add_argument("--model", choices=("lda", "nmf", "cluster"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--alpha", type=float, default=None, help="LDA alpha (default 50/K)")
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-9, help="NMF stopping tolerance")
    p.add_argument("--embeddings", help="EMB1 file for the cluster model")
    p.add_argument("--embed-dim", type=int, default=64)
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_topics_fit)

    p_coh = sub.add_parser("coherence", help="coherence evaluation")
    coh_sub = p_coh.add_subparsers(dest="action", required=True)
    p = coh_sub.add_parser("sweep", help="coherence over a K grid")
    p.add_argument("--input", required=True, help="tokenized corpus JSONL")
    p.add_argument("--models", default="lda,nmf,cluster")
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--measure", choices=("npmi", "umass"), default="npmi")
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--embeddings", help="EMB1 file for the cluster model")
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument("--lda-iterations", type=int, default=1000)
    p.add_argument("--nmf-iterations", type=int, default=200)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("classify", help="cross-validated stance classification")
    p.add_argument("--input", required=True, help="tokenized corpus JSONL")
    p.add_argument("--features", choices=("topic", "sentiment", "combined"), required=True)
    p.add_argument("--classifier", choices=("logistic", "knn", "svm"), default="logistic")
    p.add_argument("--model", dest="model_file", help="fitted topic model JSON")
    p.add_argument("--lexicon", help="sentiment lexicon (token<TAB>polarity)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--train-ratio", type=float, default=0.8)
    p.add_argument("--dataset", help="dataset name for the results record")
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("report", help="render comparison tables")
    p.add_argument("--results", nargs="+", required=True, help="classify output JSONs")
    p.add_argument("--input", required=True, help="tokenized corpus JSONL")
    p.add_argument("--sweep", help="sweep CSV for the coherence column")
    p.add_argument("--lexicon", help="sentiment lexicon used for the corr column")
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_report)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _log(str(exc))
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        _log(f"topicmetrics {args.subcommand}: error: {exc}")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
