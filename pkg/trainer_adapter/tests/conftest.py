"""Pytest fixtures over the shared adapter fixture data."""

from __future__ import annotations

from pathlib import Path

import pytest

from adapter_fixtures import TINY_OFFSETS, TINY_RECORD, produce_rewards, write_jsonl


@pytest.fixture(scope="session")
def shared_rewards(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("shared") / "rewards.jsonl"
    produce_rewards(path)
    return path


@pytest.fixture(scope="session")
def shared_rewards_bare(tmp_path_factory) -> Path:
    """The same artifact without embedded token_rewards."""
    path = tmp_path_factory.mktemp("shared-bare") / "rewards.jsonl"
    produce_rewards(path, with_offsets=False)
    return path


@pytest.fixture
def tiny_pair(tmp_path) -> tuple[Path, Path]:
    artifact = tmp_path / "tiny-rewards.jsonl"
    offsets = tmp_path / "tiny-offsets.jsonl"
    write_jsonl(artifact, [TINY_RECORD])
    write_jsonl(offsets, [TINY_OFFSETS])
    return artifact, offsets
