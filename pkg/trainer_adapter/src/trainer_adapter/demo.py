"""Toy policy-gradient consumption of aligned rewards.

The micro-task: a tabular softmax policy picks one position out of a
tiny vocabulary (one slot per token position, batches padded with
zeros), and the reward for picking position v is the mean token reward
at v across batches.  Each step follows the exact expected-reward
gradient, so the demo is deterministic and its properties are crisp:
positively rewarded anchors gain probability, zero rewards move
nothing, and mirrored batches cancel exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from trainer_adapter.loader import AlignedBatch

DEFAULT_STEPS = 100
DEFAULT_LEARNING_RATE = 0.5


@dataclass(frozen=True)
class TraceStep:
    """One training step: expected reward and the probability mass on
    positively rewarded anchor positions."""

    step: int
    expected_reward: float
    positive_anchor_mass: float


@dataclass(frozen=True)
class DemoResult:
    vocabulary_size: int
    mean_rewards: np.ndarray
    policy: np.ndarray
    trace: list[TraceStep]


def _padded_mean_rewards(batches: Sequence[AlignedBatch]) -> np.ndarray:
    size = max(len(batch.rewards) for batch in batches)
    stacked = np.zeros((len(batches), size))
    for row, batch in enumerate(batches):
        stacked[row, : len(batch.rewards)] = batch.rewards
    return stacked.mean(axis=0)


def toy_pg_demo(
    batches: Sequence[AlignedBatch],
    steps: int = DEFAULT_STEPS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
) -> DemoResult:
    """Run exact-gradient ascent on expected reward and trace it.

    The trace has ``steps + 1`` rows; row 0 is the uniform starting
    policy.  With expected reward J = sum of policy * mean reward, the
    gradient at position u is policy[u] * (reward[u] - J).
    """
    if not batches:
        raise ValueError("the demo needs at least one batch")
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")

    mean_rewards = _padded_mean_rewards(batches)
    positive = mean_rewards > 0.0
    theta = np.zeros(len(mean_rewards))

    def snapshot(step: int) -> TraceStep:
        policy = np.exp(theta - theta.max())
        policy /= policy.sum()
        return TraceStep(
            step=step,
            expected_reward=float(policy @ mean_rewards),
            positive_anchor_mass=float(policy[positive].sum()),
        )

    trace = [snapshot(0)]
    for step in range(1, steps + 1):
        policy = np.exp(theta - theta.max())
        policy /= policy.sum()
        expected = float(policy @ mean_rewards)
        theta = theta + learning_rate * policy * (mean_rewards - expected)
        trace.append(snapshot(step))

    policy = np.exp(theta - theta.max())
    policy /= policy.sum()
    return DemoResult(
        vocabulary_size=len(mean_rewards),
        mean_rewards=mean_rewards,
        policy=policy,
        trace=trace,
    )


def write_trace_csv(path, trace: Sequence[TraceStep]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "expected_reward", "positive_anchor_mass"])
        for entry in trace:
            writer.writerow(
                [entry.step, entry.expected_reward, entry.positive_anchor_mass]
            )
