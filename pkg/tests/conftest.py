"""Pytest fixtures over the shared scripted-batch data in fixture_data."""

from __future__ import annotations

import pytest

from factreward.retrieval import DocumentStore
from fixture_data import MAGAZINE_DOCUMENTS, TOPIC_DOCUMENTS, script_batch, twenty_prompt_cases


@pytest.fixture
def magazine_store() -> DocumentStore:
    return DocumentStore(MAGAZINE_DOCUMENTS)


@pytest.fixture
def full_store() -> DocumentStore:
    return DocumentStore(MAGAZINE_DOCUMENTS + TOPIC_DOCUMENTS)


@pytest.fixture
def scripted_batch(full_store):
    records, judge = script_batch(twenty_prompt_cases(), full_store)
    return records, judge, full_store
