"""Evaluation report emission.

One eval run produces, under a single output directory:

- ``report.jsonl``: one metrics row per response, input order.
- ``aggregate.json``: the dataset-level numbers.
- ``table.txt``: a plain-text summary table (#Cor., #Inc., %Res., Score).
- ``figures/``: accuracy, statement-count and informativeness
  distributions rendered to PNG files.

Floats are quantised to nine significant digits and figure metadata is
pinned so two identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from factreward.metrics import DatasetMetrics
from factreward.rewards import nine_digit_float

_FIGURE_KWARGS = {"dpi": 120, "metadata": {"Software": None}}


def format_table(dataset: DatasetMetrics) -> str:
    """The summary table: mean statement tallies over responding
    responses, response rate and score as percentages."""
    header = f"{'#Cor.':>8}{'#Inc.':>8}{'%Res.':>8}{'Score':>8}"
    row = (
        f"{dataset.avg_correct:>8.2f}"
        f"{dataset.avg_incorrect:>8.2f}"
        f"{dataset.response_ratio * 100.0:>8.1f}"
        f"{dataset.score * 100.0:>8.1f}"
    )
    return header + "\n" + row + "\n"


def _save_accuracy_figure(path: Path, rows: Sequence[dict]) -> None:
    scores = [row["factscore"] for row in rows if row["factscore"] is not None]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.hist(scores, bins=10, range=(0.0, 1.0), color="#4878a8", edgecolor="white")
    ax.set_xlabel("per-response accuracy")
    ax.set_ylabel("responses")
    ax.set_title("Accuracy distribution")
    fig.tight_layout()
    fig.savefig(path, **_FIGURE_KWARGS)
    plt.close(fig)


def _save_statement_count_figure(path: Path, rows: Sequence[dict]) -> None:
    corrects = [row["correct"] for row in rows]
    incorrects = [row["incorrect"] for row in rows]
    top = max(corrects + incorrects + [1])
    bins = range(0, top + 2)
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.hist(
        [corrects, incorrects],
        bins=bins,
        label=["correct", "incorrect"],
        color=["#50a050", "#b05050"],
    )
    ax.set_xlabel("statements per response")
    ax.set_ylabel("responses")
    ax.set_title("Statement counts")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_FIGURE_KWARGS)
    plt.close(fig)


def _save_informativeness_figure(path: Path, info_scores: Sequence[int]) -> None:
    counts = [sum(1 for score in info_scores if score == level) for level in (1, 2, 3, 4, 5)]
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.bar([1, 2, 3, 4, 5], counts, color="#8060a8", edgecolor="white")
    ax.set_xticks([1, 2, 3, 4, 5])
    ax.set_xlabel("informativeness score")
    ax.set_ylabel("statements")
    ax.set_title("Informativeness distribution")
    fig.tight_layout()
    fig.savefig(path, **_FIGURE_KWARGS)
    plt.close(fig)


def write_report(
    out_dir,
    rows: Sequence[dict],
    dataset: DatasetMetrics,
    info_scores: Sequence[int],
) -> None:
    """Write all report files for one evaluated batch."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "report.jsonl", "w", encoding="utf-8") as handle:
        for row in rows:
            record = {
                "id": row["id"],
                "correct": row["correct"],
                "incorrect": row["incorrect"],
                "responded": row["responded"],
                "factscore": (
                    nine_digit_float(row["factscore"])
                    if row["factscore"] is not None
                    else None
                ),
            }
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")

    summary = {
        "total": dataset.total,
        "responded": dataset.responded,
        "avg_correct": nine_digit_float(dataset.avg_correct),
        "avg_incorrect": nine_digit_float(dataset.avg_incorrect),
        "avg_correct_all": nine_digit_float(dataset.avg_correct_all),
        "avg_incorrect_all": nine_digit_float(dataset.avg_incorrect_all),
        "response_ratio": nine_digit_float(dataset.response_ratio),
        "score": nine_digit_float(dataset.score),
        "refusals_only": dataset.refusals_only,
    }
    with open(out / "aggregate.json", "w", encoding="utf-8") as handle:
        json.dump(summary, handle, ensure_ascii=False, indent=2)
        handle.write("\n")

    with open(out / "table.txt", "w", encoding="utf-8") as handle:
        handle.write(format_table(dataset))

    figures = out / "figures"
    figures.mkdir(exist_ok=True)
    _save_accuracy_figure(figures / "accuracy_distribution.png", rows)
    _save_statement_count_figure(figures / "statement_counts.png", rows)
    _save_informativeness_figure(figures / "informativeness_distribution.png", info_scores)
