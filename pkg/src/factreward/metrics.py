"""Factuality metrics over annotated responses.

A statement counts as correct when its label is Correct or Hedged
Correct; Wrong, Hedged Wrong and Vague all count against, because an
unverifiable claim is a cost, not a free pass.  A response "responded"
when it produced at least one statement; refusals are tracked separately
so a model cannot buy accuracy by refusing everything.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Sequence

from factreward.annotation import SentenceAnnotation


class EmptyBatch(ValueError):
    """Aggregation was asked for zero responses."""


@dataclass(frozen=True)
class ResponseMetrics:
    """Statement tallies for one response.

    ``factscore`` is correct / (correct + incorrect), present only when
    the response yielded statements at all.
    """

    correct: int
    incorrect: int
    responded: bool
    factscore: float | None


@dataclass(frozen=True)
class DatasetMetrics:
    """Aggregates over a batch of responses.

    ``avg_correct`` and ``avg_incorrect`` average over responses that
    produced statements; the ``_all`` variants average over every
    response, counting refusals as zero.  ``score`` is the mean factscore
    over responding responses, or 0.0 with ``refusals_only`` set when
    nothing responded.
    """

    total: int
    responded: int
    avg_correct: float
    avg_incorrect: float
    avg_correct_all: float
    avg_incorrect_all: float
    response_ratio: float
    score: float
    refusals_only: bool


def score_response(annotation: Sequence[SentenceAnnotation]) -> ResponseMetrics:
    """Tally one response's statement labels."""
    correct = incorrect = 0
    for sentence in annotation:
        for statement in sentence.statements:
            if statement.verification is None:
                raise ValueError(
                    f"statement {statement.text!r} has no verification label"
                )
            if statement.verification.counts_correct:
                correct += 1
            else:
                incorrect += 1
    if correct + incorrect == 0:
        return ResponseMetrics(correct=0, incorrect=0, responded=False, factscore=None)
    return ResponseMetrics(
        correct=correct,
        incorrect=incorrect,
        responded=True,
        factscore=correct / (correct + incorrect),
    )


def aggregate(metrics: Sequence[ResponseMetrics]) -> DatasetMetrics:
    """Combine response metrics into dataset-level numbers."""
    if not metrics:
        raise EmptyBatch("cannot aggregate an empty batch")
    total = len(metrics)
    responded = [m for m in metrics if m.responded]
    avg_correct_all = fmean(m.correct for m in metrics)
    avg_incorrect_all = fmean(m.incorrect for m in metrics)
    if not responded:
        return DatasetMetrics(
            total=total,
            responded=0,
            avg_correct=0.0,
            avg_incorrect=0.0,
            avg_correct_all=avg_correct_all,
            avg_incorrect_all=avg_incorrect_all,
            response_ratio=0.0,
            score=0.0,
            refusals_only=True,
        )
    return DatasetMetrics(
        total=total,
        responded=len(responded),
        avg_correct=fmean(m.correct for m in responded),
        avg_incorrect=fmean(m.incorrect for m in responded),
        avg_correct_all=avg_correct_all,
        avg_incorrect_all=avg_incorrect_all,
        response_ratio=len(responded) / total,
        score=fmean(m.factscore for m in responded),
        refusals_only=False,
    )
