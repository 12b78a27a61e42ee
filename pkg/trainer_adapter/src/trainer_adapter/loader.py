"""Reward artifact loading and token alignment.

The producer side emits line-delimited JSON records of the form

    {"id": ..., "response": ..., "events": [{"offset", "value", "kind"}, ...],
     "token_rewards": [...], "config_name": ...}

with ``token_rewards`` optional, plus a separate offsets file of
``{"id": ..., "offsets": [[start, end], ...]}`` rows.  This module turns
the two files into per-token reward arrays without importing the
producer: the artifact format is the whole contract.

Event values in the artifact are quantised to nine significant digits,
and embedded token arrays are projections of exactly those values, so
recomputing the projection here reproduces them bit for bit.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EVENT_KINDS = ("truth", "info")


class SchemaMismatch(ValueError):
    """An artifact or offsets record does not match the wire format."""


class MissingOffsets(SchemaMismatch):
    """A reward record has no row in the offsets file."""


class UncoveredOffset(ValueError):
    """An event offset falls outside every token span."""


def _nine_digit(value: float) -> float:
    return float(f"{value:.9g}")


@dataclass(frozen=True)
class AlignedBatch:
    """One record's rewards projected onto its token grid.

    ``rewards`` carries one float per token; ``anchor_mask`` marks the
    tokens that received at least one event.
    """

    record_id: str
    offsets: tuple[tuple[int, int], ...]
    rewards: np.ndarray
    anchor_mask: np.ndarray

    def __post_init__(self) -> None:
        if len(self.rewards) != len(self.offsets):
            raise ValueError(
                f"record {self.record_id!r}: {len(self.rewards)} rewards "
                f"for {len(self.offsets)} tokens"
            )
        if len(self.anchor_mask) != len(self.offsets):
            raise ValueError(
                f"record {self.record_id!r}: anchor mask length mismatch"
            )


def _parse_offsets_row(row: dict) -> tuple[tuple[int, int], ...]:
    spans = []
    previous_end = 0
    for pair in row["offsets"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise SchemaMismatch(f"offsets entry is not a pair: {pair!r}")
        start, end = pair
        if not isinstance(start, int) or not isinstance(end, int):
            raise SchemaMismatch(f"offsets must be integers: {pair!r}")
        if start < previous_end or end <= start:
            raise SchemaMismatch(
                f"offsets must be ordered, non-overlapping spans: {pair!r}"
            )
        spans.append((start, end))
        previous_end = end
    return tuple(spans)


def read_offsets(path) -> dict[str, tuple[tuple[int, int], ...]]:
    """Read an offsets file into a map of record id to token spans."""
    offsets_by_id: dict[str, tuple[tuple[int, int], ...]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            row = json.loads(line)
            try:
                offsets_by_id[str(row["id"])] = _parse_offsets_row(row)
            except KeyError as error:
                raise SchemaMismatch(f"offsets row missing {error}") from error
    return offsets_by_id


def _parse_events(record: dict) -> list[tuple[int, float]]:
    events = []
    for entry in record["events"]:
        try:
            offset, value, kind = entry["offset"], entry["value"], entry["kind"]
        except (TypeError, KeyError) as error:
            raise SchemaMismatch(
                f"record {record['id']!r}: malformed event {entry!r}"
            ) from error
        if kind not in EVENT_KINDS:
            raise SchemaMismatch(
                f"record {record['id']!r}: unknown event kind {kind!r}"
            )
        if not isinstance(offset, int) or offset < 0:
            raise SchemaMismatch(
                f"record {record['id']!r}: bad event offset {offset!r}"
            )
        events.append((offset, float(value)))
    return events


def _project(
    record_id: str,
    events: list[tuple[int, float]],
    offsets: tuple[tuple[int, int], ...],
) -> tuple[np.ndarray, np.ndarray]:
    starts = [start for start, _ in offsets]
    rewards = [0.0] * len(offsets)
    anchored = [False] * len(offsets)
    for offset, value in events:
        index = bisect_right(starts, offset) - 1
        if index < 0 or offset >= offsets[index][1]:
            raise UncoveredOffset(
                f"record {record_id!r}: event at offset {offset} is outside "
                f"every token span"
            )
        rewards[index] += value
        anchored[index] = True
    quantised = [_nine_digit(value) for value in rewards]
    return np.asarray(quantised, dtype=np.float64), np.asarray(anchored, dtype=bool)


def load_rewards(artifact_path, offsets_path) -> list[AlignedBatch]:
    """Align a reward artifact with its token offsets file.

    Every record must have an offsets row.  When a record embeds
    ``token_rewards`` the recomputed projection must reproduce it
    exactly; a difference means the two files do not belong together.
    """
    offsets_by_id = read_offsets(offsets_path)
    batches: list[AlignedBatch] = []
    with open(Path(artifact_path), "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            missing = {"id", "response", "events", "config_name"} - set(record)
            if missing:
                raise SchemaMismatch(f"record missing fields: {sorted(missing)}")
            record_id = str(record["id"])
            if record_id not in offsets_by_id:
                raise MissingOffsets(f"no offsets row for record {record_id!r}")
            offsets = offsets_by_id[record_id]
            events = _parse_events(record)
            rewards, anchor_mask = _project(record_id, events, offsets)

            # Projection only moves values onto tokens, so the array must
            # preserve the event sum up to per-token quantisation: nine
            # significant digits round each token by at most 5e-9 of its
            # magnitude.
            event_sum = sum(value for _, value in events)
            slack = 5e-9 * max(1.0, float(np.abs(rewards).sum()))
            if abs(float(rewards.sum()) - event_sum) > slack:
                raise SchemaMismatch(
                    f"record {record_id!r}: token rewards sum "
                    f"{float(rewards.sum())!r} != event sum {event_sum!r}"
                )

            embedded = record.get("token_rewards")
            if embedded is not None and list(rewards) != [float(v) for v in embedded]:
                raise SchemaMismatch(
                    f"record {record_id!r}: embedded token_rewards disagree "
                    f"with the projection of its events"
                )
            batches.append(
                AlignedBatch(
                    record_id=record_id,
                    offsets=offsets,
                    rewards=rewards,
                    anchor_mask=anchor_mask,
                )
            )
    return batches
