"""File-to-file pipeline stages: annotate, reward, eval.

Every stage reads and writes line-delimited JSON so stages can run
separately, be re-run idempotently, or be chained by ``run_pipeline``.
Only the annotate stage ever talks to a judge; reward and eval are pure
functions of artifacts already on disk.  Input order is preserved in
every artifact regardless of worker count, and per-record annotation
failures are recorded inline rather than dropped, so a 100-line input
always yields a 100-line artifact.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from factreward.align import CharRange, resolve_spans
from factreward.annotation import (
    MalformedAnnotation,
    SentenceAnnotation,
    StatementAnnotation,
    VerificationLabel,
)
from factreward.judge import JudgeClient, ResponseAnnotation, annotate_response
from factreward.metrics import ResponseMetrics, aggregate, score_response
from factreward.prompts import MissingSlot
from factreward.report import write_report
from factreward.retrieval import DocumentStore
from factreward.rewards import (
    RewardConfig,
    build_reward_events,
    nine_digit_float,
    reward_record,
    to_token_rewards,
    token_offsets_from_pairs,
)

DEFAULT_WORKERS = 4
DEFAULT_SPAN_FAILURE_THRESHOLD = 0.2


class SpanFailureRateExceeded(ValueError):
    """Too many statements could not be located in their responses."""


class MissingTokenOffsets(ValueError):
    """A reward record has no offsets entry in the supplied offsets file."""


def read_jsonl(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def write_jsonl(path, records: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")


def _sentence_to_dict(sentence: SentenceAnnotation) -> dict:
    return {
        "index": sentence.index,
        "text": sentence.text,
        "statements": [
            {
                "text": statement.text,
                "verification": statement.verification.value,
                "info": statement.info,
            }
            for statement in sentence.statements
        ],
    }


def _sentence_from_dict(record: dict) -> SentenceAnnotation:
    return SentenceAnnotation(
        index=record["index"],
        text=record["text"],
        statements=[
            StatementAnnotation(
                text=statement["text"],
                verification=VerificationLabel(statement["verification"]),
                info=statement["info"],
            )
            for statement in record["statements"]
        ],
    )


def annotation_record(record_id: str, annotation: ResponseAnnotation) -> dict:
    """One annotation artifact record with a fixed field order."""
    return {
        "id": record_id,
        "prompt": annotation.prompt,
        "response": annotation.response,
        "sentences": [_sentence_to_dict(sentence) for sentence in annotation.sentences],
        "provenance": [
            {
                "sentence": entry.sentence_index,
                "statement": entry.statement_index,
                "contexts": entry.context_ids,
                "verification": entry.verification,
                "assessment": entry.assessment,
            }
            for entry in annotation.provenance
        ],
    }


def run_annotate(
    records: Sequence[dict],
    judge: JudgeClient,
    store: DocumentStore,
    retrieval_limit: int = 3,
    workers: int = DEFAULT_WORKERS,
) -> list[dict]:
    """Annotate a batch of ``{id, prompt, response}`` records.

    Responses are judged concurrently but the artifact keeps input
    order.  A response whose extraction reply cannot be parsed or
    rendered becomes an inline error record; an unreachable judge
    propagates, since every remaining record would fail the same way.
    """
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")

    def annotate_one(record: dict) -> dict:
        record_id = str(record["id"])
        try:
            annotation = annotate_response(
                prompt=record["prompt"],
                response=record["response"],
                judge=judge,
                store=store,
                limit=retrieval_limit,
            )
        except (MalformedAnnotation, MissingSlot) as error:
            return {
                "id": record_id,
                "prompt": record["prompt"],
                "response": record["response"],
                "error": f"{type(error).__name__}: {error}",
            }
        return annotation_record(record_id, annotation)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(annotate_one, records))


def load_token_offsets(path) -> dict[str, list[CharRange]]:
    """Load a token offsets file of ``{id, offsets: [[start, end], ...]}``."""
    offsets_by_id: dict[str, list[CharRange]] = {}
    for record in read_jsonl(path):
        offsets_by_id[str(record["id"])] = token_offsets_from_pairs(record["offsets"])
    return offsets_by_id


@dataclass(frozen=True)
class RewardStageResult:
    records: list[dict]
    statements_total: int
    statements_unlocated: int

    @property
    def failure_rate(self) -> float:
        if self.statements_total == 0:
            return 0.0
        return self.statements_unlocated / self.statements_total


def run_reward(
    annotation_records: Sequence[dict],
    config: RewardConfig,
    min_ratio: float = 0.7,
    offsets_by_id: dict[str, list[CharRange]] | None = None,
) -> RewardStageResult:
    """Resolve spans and convert annotations into reward records.

    Records that failed annotation carry no statements, so they emit an
    empty event list; they stay in the artifact to keep it aligned with
    the input.  When an offsets map is supplied every record must have an
    entry, and ``token_rewards`` is populated from it.
    """
    records: list[dict] = []
    total = 0
    unlocated = 0
    for record in annotation_records:
        record_id = str(record["id"])
        response = record["response"]
        sentences = [_sentence_from_dict(entry) for entry in record.get("sentences", [])]
        resolved = resolve_spans(response, sentences, min_ratio)
        for sentence in resolved:
            for statement in sentence.statements:
                total += 1
                if statement.span is None:
                    unlocated += 1
        # Event values are quantised before projection so token_rewards
        # can be re-derived exactly from the event values the artifact
        # actually carries.
        events = [
            replace(event, value=nine_digit_float(event.value))
            for event in build_reward_events(response, resolved, config)
        ]

        token_rewards = None
        if offsets_by_id is not None:
            if record_id not in offsets_by_id:
                raise MissingTokenOffsets(
                    f"no token offsets for record {record_id!r}"
                )
            token_rewards = to_token_rewards(events, offsets_by_id[record_id])

        records.append(
            reward_record(
                record_id=record_id,
                response=response,
                events=events,
                config_name=config.name,
                token_rewards=token_rewards,
            )
        )
    return RewardStageResult(
        records=records, statements_total=total, statements_unlocated=unlocated
    )


def check_failure_rate(
    result: RewardStageResult, threshold: float = DEFAULT_SPAN_FAILURE_THRESHOLD
) -> None:
    """Raise when span resolution failed more often than tolerated."""
    if result.failure_rate > threshold:
        raise SpanFailureRateExceeded(
            f"span resolution failed for {result.statements_unlocated} of "
            f"{result.statements_total} statements "
            f"({result.failure_rate:.1%} > {threshold:.1%})"
        )


def run_eval(annotation_records: Sequence[dict], out_dir) -> None:
    """Score an annotation artifact and write the full report.

    Records with an inline annotation error have no statements and are
    counted as refusals; they failed to produce checkable content.
    """
    rows: list[dict] = []
    all_metrics: list[ResponseMetrics] = []
    info_scores: list[int] = []
    for record in annotation_records:
        sentences = [_sentence_from_dict(entry) for entry in record.get("sentences", [])]
        metrics = score_response(sentences)
        all_metrics.append(metrics)
        rows.append(
            {
                "id": str(record["id"]),
                "correct": metrics.correct,
                "incorrect": metrics.incorrect,
                "responded": metrics.responded,
                "factscore": metrics.factscore,
            }
        )
        for sentence in sentences:
            info_scores.extend(
                statement.info for statement in sentence.statements
                if statement.info is not None
            )
    dataset = aggregate(all_metrics)
    write_report(out_dir, rows, dataset, info_scores)
