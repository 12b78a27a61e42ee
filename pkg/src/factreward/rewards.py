"""Token-level reward shaping from statement-level factuality verdicts.

Two reward channels are emitted as point events on character offsets:

- truth: ``alpha * f(label) * |g(info)|`` anchored at the last character
  of each located statement.  ``f`` maps the verification label to a
  signed weight and ``|g|`` scales it by how much the claim mattered, so
  an important wrong claim costs more than a throwaway one.
- info: ``beta * ln(mu + max(epsilon, sum_i g(info_i)))`` anchored at the
  last character of each located sentence, pooling the informativeness of
  all its statements.  The inner ``max`` floors the pool at ``epsilon``
  so a pile of useless statements cannot push the log toward minus
  infinity; ``mu + epsilon > 0`` keeps the log defined.

Events are projected onto a tokenisation by adding each event's value to
the token whose character range contains its offset.  The wire format
for reward artifacts (one JSON object per line, fixed field order, floats
quantised to nine significant digits for byte-stable reruns) also lives
here.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from factreward.align import CharRange
from factreward.annotation import (
    INFO_SCALE,
    SentenceAnnotation,
    VerificationLabel,
)


class UncoveredOffset(ValueError):
    """An event offset fell in a gap of the token offset map."""


class MissingSentenceSpan(UserWarning):
    """A sentence had no resolved span, so its reward events were skipped."""


@dataclass(frozen=True)
class RewardConfig:
    """Hyperparameters of the two reward channels.

    ``f_map`` must cover every verification label and ``g_map`` every
    informativeness score; partial tables would turn config typos into
    silent KeyErrors mid-batch.
    """

    name: str
    alpha: float
    beta: float
    epsilon: float
    mu: float
    f_map: Mapping[VerificationLabel, float]
    g_map: Mapping[int, float]

    def __post_init__(self) -> None:
        if self.mu + self.epsilon <= 0.0:
            raise ValueError(
                f"mu + epsilon must stay positive, got {self.mu} + {self.epsilon}"
            )
        missing_labels = [label.value for label in VerificationLabel if label not in self.f_map]
        if missing_labels:
            raise ValueError(f"f_map lacks labels: {missing_labels}")
        missing_scores = [score for score in INFO_SCALE if score not in self.g_map]
        if missing_scores:
            raise ValueError(f"g_map lacks scores: {missing_scores}")


def qwen_preset() -> RewardConfig:
    """Reward weights tuned for Qwen2.5-7B-Instruct."""
    return RewardConfig(
        name="qwen",
        alpha=1.0,
        beta=1.2,
        epsilon=-0.9,
        mu=1.0,
        f_map={
            VerificationLabel.CORRECT: 0.45,
            VerificationLabel.HEDGED_CORRECT: 0.35,
            VerificationLabel.VAGUE: -1.0,
            VerificationLabel.HEDGED_WRONG: -1.5,
            VerificationLabel.WRONG: -1.7,
        },
        g_map={5: 1.25, 4: 1.0, 3: 0.75, 2: 0.1, 1: -0.2},
    )


def llama_preset() -> RewardConfig:
    """Reward weights tuned for Llama3.1-8B-Instruct."""
    return RewardConfig(
        name="llama",
        alpha=1.0,
        beta=1.2,
        epsilon=-0.9,
        mu=1.0,
        f_map={
            VerificationLabel.CORRECT: 0.2,
            VerificationLabel.HEDGED_CORRECT: 0.1,
            VerificationLabel.VAGUE: -1.8,
            VerificationLabel.HEDGED_WRONG: -2.0,
            VerificationLabel.WRONG: -2.2,
        },
        g_map={5: 1.2, 4: 1.0, 3: 0.8, 2: 0.6, 1: -0.1},
    )


PRESETS = {"qwen": qwen_preset, "llama": llama_preset}


def truth_reward(label: VerificationLabel, info: int, config: RewardConfig) -> float:
    """Reward for one verified statement of a given informativeness."""
    return config.alpha * config.f_map[label] * abs(config.g_map[info])


def info_reward(scores: Sequence[int], config: RewardConfig) -> float:
    """Pooled informativeness reward for one sentence's statement scores."""
    if not scores:
        raise ValueError("info reward needs at least one statement score")
    pooled = sum(config.g_map[score] for score in scores)
    return config.beta * math.log(config.mu + max(config.epsilon, pooled))


class EventKind(str, enum.Enum):
    TRUTH = "truth"
    INFO = "info"


@dataclass(frozen=True)
class RewardEvent:
    """A point reward at one character offset of the response."""

    offset: int
    value: float
    kind: EventKind


def build_reward_events(
    response: str,
    annotation: Sequence[SentenceAnnotation],
    config: RewardConfig,
) -> list[RewardEvent]:
    """Turn a span-resolved annotation into reward events.

    Per sentence: one truth event at the last character of every located
    statement, then one info event at the last character of the sentence
    pooling every statement's score.  Unlocatable statements emit no
    truth event but still enter the pool; what the model said is priced
    even when it cannot be pointed at.  A sentence without a span has
    nothing to anchor to, so its events are skipped and reported with a
    :class:`MissingSentenceSpan` warning.
    """
    events: list[RewardEvent] = []
    for sentence in annotation:
        if sentence.span is None:
            warnings.warn(
                MissingSentenceSpan(
                    f"sentence {sentence.index} has no resolved span; "
                    "skipping its reward events"
                ),
                stacklevel=2,
            )
            continue
        if sentence.span.end > len(response):
            raise ValueError(
                f"sentence {sentence.index} span {sentence.span} exceeds response "
                f"length {len(response)}"
            )
        scores = []
        for statement in sentence.statements:
            if statement.verification is None or statement.info is None:
                raise ValueError(
                    f"statement {statement.text!r} lacks a verification or "
                    "informativeness score"
                )
            scores.append(statement.info)
            if statement.span is None:
                continue
            events.append(
                RewardEvent(
                    offset=statement.span.end - 1,
                    value=truth_reward(statement.verification, statement.info, config),
                    kind=EventKind.TRUTH,
                )
            )
        if scores:
            events.append(
                RewardEvent(
                    offset=sentence.span.end - 1,
                    value=info_reward(scores, config),
                    kind=EventKind.INFO,
                )
            )
    return events


def check_token_offsets(offsets: Sequence[CharRange]) -> None:
    """Reject unsorted or overlapping token ranges."""
    for before, after in zip(offsets, offsets[1:]):
        if after.start < before.end:
            raise ValueError(
                f"token offsets must be sorted and non-overlapping; "
                f"{after} follows {before}"
            )


def to_token_rewards(
    events: Iterable[RewardEvent], offsets: Sequence[CharRange]
) -> list[float]:
    """Project point events onto a token grid.

    Each event lands on the token whose range contains its offset; tokens
    hit by several events accumulate.  An offset in a gap raises
    :class:`UncoveredOffset` instead of being clipped: silently moving a
    reward to a neighbouring token would corrupt training.
    """
    check_token_offsets(offsets)
    starts = [token.start for token in offsets]
    values = [0.0] * len(offsets)
    for event in events:
        position = bisect_right(starts, event.offset) - 1
        if position < 0 or event.offset >= offsets[position].end:
            raise UncoveredOffset(
                f"event offset {event.offset} is not covered by any token range"
            )
        values[position] += event.value
    return values


def nine_digit_float(value: float) -> float:
    # Quantising to nine significant digits keeps artifact bytes stable
    # across reruns while staying far above the comparison tolerances.
    return float(f"{value:.9g}")


def token_offsets_from_pairs(pairs: Sequence[Sequence[int]]) -> list[CharRange]:
    """Build validated token ranges from ``[[start, end], ...]`` pairs."""
    offsets = [CharRange(int(start), int(end)) for start, end in pairs]
    check_token_offsets(offsets)
    return offsets


def reward_record(
    record_id: str,
    response: str,
    events: Sequence[RewardEvent],
    config_name: str,
    token_rewards: Sequence[float] | None = None,
) -> dict:
    """One reward artifact record with the fixed field order."""
    record: dict = {
        "id": record_id,
        "response": response,
        "events": [
            {
                "offset": event.offset,
                "value": nine_digit_float(event.value),
                "kind": event.kind.value,
            }
            for event in events
        ],
    }
    if token_rewards is not None:
        record["token_rewards"] = [nine_digit_float(value) for value in token_rewards]
    record["config_name"] = config_name
    return record


def write_reward_artifact(path, records: Iterable[dict]) -> None:
    """Write reward records as line-delimited JSON."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")


def read_reward_artifact(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
