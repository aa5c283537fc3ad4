"""Comparison statistics and table rendering for experiment outputs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherence import SweepResult, best_scores, enhancement
from .validation import check_binary_labels, check_consistent_length


def point_biserial(stance, sentiment) -> float:
    """Correlation between 0/1 stance labels and sentiment scores
    (Pearson correlation on the binary variable)."""
    labels = check_binary_labels(stance, "stance")
    scores = np.asarray(sentiment, dtype=np.float64)
    check_consistent_length(labels, scores, names="stance and sentiment")
    if len(labels) < 2:
        raise ValueError("need at least 2 observations")
    if labels.min() == labels.max():
        raise ValueError("stance has a single class; correlation undefined")
    if np.ptp(scores) == 0:
        raise ValueError("sentiment is constant; correlation undefined")
    lx = labels - labels.mean()
    sy = scores - scores.mean()
    return float((lx * sy).sum() / math.sqrt((lx * lx).sum() * (sy * sy).sum()))


def improvement(metric_f1: float, sentiment_f1: float) -> float:
    """Signed relative F1 gain over the sentiment baseline, as a raw
    percentage (round to 2 decimals for display)."""
    if sentiment_f1 <= 0:
        raise ValueError("sentiment baseline must be > 0")
    return (metric_f1 - sentiment_f1) / sentiment_f1 * 100.0


@dataclass
class ComparisonRow:
    """One dataset's comparison cells: F1 per feature set, dispersion,
    stance-sentiment correlation, and the best coherence score."""

    dataset: str
    f1_topic: float
    sd_topic: float
    f1_sentiment: float
    sd_sentiment: float
    f1_combined: float
    sd_combined: float
    corr: float
    coherence_best: float | None = None

    @property
    def impr_topic_pct(self) -> float:
        return improvement(self.f1_topic, self.f1_sentiment)

    @property
    def impr_combined_pct(self) -> float:
        return improvement(self.f1_combined, self.f1_sentiment)


def _f1_cell(f1: float, sd: float, is_max: bool) -> str:
    cell = f"{f1:.4f} ({sd:.4f})"
    return f"**{cell}**" if is_max else cell


def _render_markdown(rows: list[ComparisonRow], sweep: SweepResult | None) -> str:
    lines = ["# Topic and sentiment metrics report", ""]

    if sweep is not None and sweep.rows:
        best = best_scores(sweep)
        lines += ["## Best coherence by model", ""]
        lines += ["| model | best score |", "| --- | --- |"]
        for kind in sorted(best):
            lines.append(f"| {kind} | {best[kind]:.4f} |")
        if {"lda", "nmf", "cluster"} <= set(best):
            pct = enhancement(best["cluster"], best["lda"], best["nmf"])
            lines += [
                "",
                f"Cluster-model enhancement over the better of LDA/NMF: {pct:.2f}%",
            ]
        lines.append("")

    lines += ["## Stance classification (F1 per feature set)", ""]
    lines += [
        "| dataset | topic | sentiment | combined | corr(stance, sentiment) |",
        "| --- | --- | --- | --- | --- |",
    ]
    for row in rows:
        f1s = (row.f1_topic, row.f1_sentiment, row.f1_combined)
        top = max(f1s)
        lines.append(
            "| {} | {} | {} | {} | {:.2f} |".format(
                row.dataset,
                _f1_cell(row.f1_topic, row.sd_topic, row.f1_topic == top),
                _f1_cell(row.f1_sentiment, row.sd_sentiment, row.f1_sentiment == top),
                _f1_cell(row.f1_combined, row.sd_combined, row.f1_combined == top),
                row.corr,
            )
        )
    lines.append("")

    lines += ["## Improvement over sentiment", ""]
    lines += [
        "| dataset | topic | combined | best coherence | corr(stance, sentiment) |",
        "| --- | --- | --- | --- | --- |",
    ]
    for row in rows:
        coherence_cell = (
            f"{row.coherence_best:.4f}" if row.coherence_best is not None else ""
        )
        lines.append(
            "| {} | {:.2f}% | {:.2f}% | {} | {:.2f} |".format(
                row.dataset,
                row.impr_topic_pct,
                row.impr_combined_pct,
                coherence_cell,
                row.corr,
            )
        )
    lines.append("")
    return "\n".join(lines)


_CSV_HEADER = (
    "dataset,f1_topic,sd_topic,f1_sentiment,sd_sentiment,f1_combined,"
    "sd_combined,corr,impr_topic_pct,impr_combined_pct,coherence_best"
)


def _render_csv(rows: list[ComparisonRow]) -> str:
    lines = [_CSV_HEADER]
    for row in rows:
        coherence_cell = (
            f"{row.coherence_best:.4f}" if row.coherence_best is not None else ""
        )
        lines.append(
            f"{row.dataset},{row.f1_topic:.4f},{row.sd_topic:.4f},"
            f"{row.f1_sentiment:.4f},{row.sd_sentiment:.4f},"
            f"{row.f1_combined:.4f},{row.sd_combined:.4f},{row.corr:.4f},"
            f"{row.impr_topic_pct:.2f},{row.impr_combined_pct:.2f},{coherence_cell}"
        )
    return "\n".join(lines) + "\n"


def render_report(
    rows: list[ComparisonRow],
    sweep: SweepResult | None = None,
    format: str = "markdown",
) -> str:
    """Render the comparison tables; byte-deterministic in its inputs.

    Markdown marks the maximum F1 per dataset row in bold (ties mark all
    maxima); CSV emits one line per dataset with fixed columns.
    """
    if not rows:
        raise ValueError("no comparison rows to render")
    if format == "markdown":
        return _render_markdown(rows, sweep)
    if format == "csv":
        return _render_csv(rows)
    raise ValueError(f"unknown report format: {format!r}")
