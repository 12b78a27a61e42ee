"""BM25 retrieval of reference passages for statement verification.

The store is a small in-memory inverted index, deliberately dependency
free: corpora here are per-task reference sets (a few thousand passages
at most), not web-scale collections.  Scoring is Okapi BM25 with the
non-negative idf variant ``ln(1 + (N - df + 0.5) / (df + 0.5))`` and the
usual length normalisation.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
DEFAULT_LIMIT = 3

# Lowercased alphanumeric runs; everything else is a separator.
_TOKEN_RE = re.compile(r"\w+")


class EmptyStore(ValueError):
    """Retrieval was asked against a store with no documents."""


def tokenize(text: str) -> list[str]:
    """Split on whitespace and punctuation, lowercased."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Document:
    """One reference passage."""

    doc_id: str
    title: str
    text: str


class DocumentStore:
    """Inverted-index BM25 store over title and body tokens."""

    def __init__(
        self,
        documents: Iterable[Document],
        k1: float = DEFAULT_K1,
        b: float = DEFAULT_B,
    ) -> None:
        self.k1 = k1
        self.b = b
        self._documents: list[Document] = []
        self._frequencies: list[Counter[str]] = []
        self._lengths: list[int] = []
        self._doc_count_by_term: Counter[str] = Counter()
        seen: set[str] = set()
        for document in documents:
            if not document.doc_id:
                raise ValueError("document identifiers must be non-empty")
            if document.doc_id in seen:
                raise ValueError(f"duplicate document identifier: {document.doc_id!r}")
            seen.add(document.doc_id)
            tokens = tokenize(f"{document.title} {document.text}")
            self._documents.append(document)
            self._frequencies.append(Counter(tokens))
            self._lengths.append(len(tokens))
            self._doc_count_by_term.update(set(tokens))
        total = sum(self._lengths)
        self._avg_length = total / len(self._lengths) if self._lengths else 0.0

    @classmethod
    def from_jsonl(cls, path, k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> "DocumentStore":
        """Load documents from line-delimited JSON of {id, title, text}."""
        documents = []
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                documents.append(
                    Document(
                        doc_id=str(record["id"]),
                        title=record.get("title", ""),
                        text=record["text"],
                    )
                )
        return cls(documents, k1=k1, b=b)

    def __len__(self) -> int:
        return len(self._documents)

    def _idf(self, term: str) -> float:
        df = self._doc_count_by_term.get(term, 0)
        n = len(self._documents)
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def score(self, query_tokens: Sequence[str], index: int) -> float:
        """BM25 score of document ``index`` for the token multiset."""
        frequencies = self._frequencies[index]
        length = self._lengths[index]
        norm = 1.0 - self.b + self.b * (length / self._avg_length if self._avg_length else 0.0)
        total = 0.0
        for term in query_tokens:
            tf = frequencies.get(term, 0)
            if tf == 0:
                continue
            total += self._idf(term) * (tf * (self.k1 + 1.0)) / (tf + self.k1 * norm)
        return total

    def retrieve(self, query: str, limit: int = DEFAULT_LIMIT) -> list[Document]:
        """The ``limit`` best documents for the query, best first.

        Score ties break on the document identifier so retrieval order
        never depends on ingestion order.  A limit beyond the corpus size
        returns everything, ranked.
        """
        if not self._documents:
            raise EmptyStore("cannot retrieve from an empty document store")
        if limit < 1:
            raise ValueError(f"retrieval limit must be positive, got {limit}")
        query_tokens = tokenize(query)
        ranked = sorted(
            range(len(self._documents)),
            key=lambda index: (-self.score(query_tokens, index), self._documents[index].doc_id),
        )
        return [self._documents[index] for index in ranked[:limit]]


def retrieve_contexts(
    statement: str, store: DocumentStore, limit: int = DEFAULT_LIMIT
) -> list[Document]:
    """Reference passages most relevant to one statement."""
    return store.retrieve(statement, limit)
