"""Judge-driven response annotation.

One extraction call decomposes the response into sentences and atomic
statements.  Each statement then gets one verification call (against
passages retrieved for it) and one assessment call (against the original
question and full response).  The judge is anything with a
``complete(prompt) -> str`` method; an HTTP chat-completion client and a
scripted mock share that interface so pipelines can swap one for the
other without touching anything else.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Protocol

import requests

from factreward.annotation import (
    SentenceAnnotation,
    UnknownLabel,
    MalformedScore,
    OutOfRangeScore,
    VerificationLabel,
    parse_assessment,
    parse_extraction,
    parse_verification,
)
from factreward.prompts import PromptTask, render_prompts
from factreward.retrieval import DocumentStore, retrieve_contexts

API_KEY_ENV = "FACTREWARD_API_KEY"
DEFAULT_IN_FLIGHT = 8
FALLBACK_INFO_SCORE = 3  # scale midpoint; a lost assessment should not skew the pool


class JudgeUnavailable(RuntimeError):
    """The judge could not produce a reply after exhausting retries."""


class JudgeClient(Protocol):
    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class JudgeEndpoint:
    """Connection settings for a chat-completion judge service."""

    base_url: str
    model: str
    timeout: float = 30.0
    max_retries: int = 3
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")


class HttpJudgeClient:
    """Chat-completion client with retries and an in-flight request cap.

    Requests are JSON POSTs of ``{model, messages, temperature}`` to the
    endpoint's ``/chat/completions`` route.  The bearer token is read
    from ``FACTREWARD_API_KEY`` at call time; without it the request is
    sent unauthenticated, which suits local judge deployments.
    """

    def __init__(
        self,
        endpoint: JudgeEndpoint,
        session: requests.Session | None = None,
        max_in_flight: int = DEFAULT_IN_FLIGHT,
    ) -> None:
        if max_in_flight < 1:
            raise ValueError(f"max_in_flight must be positive, got {max_in_flight}")
        self.endpoint = endpoint
        self._session = session or requests.Session()
        self._gate = threading.BoundedSemaphore(max_in_flight)

    def complete(self, prompt: str) -> str:
        url = self.endpoint.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": self.endpoint.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.endpoint.temperature,
        }
        headers = {}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_error: Exception | None = None
        for attempt in range(self.endpoint.max_retries + 1):
            if attempt:
                time.sleep(min(0.2 * 2 ** (attempt - 1), 2.0))
            try:
                with self._gate:
                    response = self._session.post(
                        url, json=payload, headers=headers, timeout=self.endpoint.timeout
                    )
                response.raise_for_status()
                body = response.json()
                return body["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, TypeError, ValueError) as error:
                last_error = error
        raise JudgeUnavailable(
            f"judge at {self.endpoint.base_url} failed after "
            f"{self.endpoint.max_retries + 1} attempts: {last_error}"
        ) from last_error


class MockJudgeClient:
    """Scripted judge backed by a prompt-hash to reply mapping.

    The fixture file is a single JSON object keyed by the SHA-256 hex
    digest of the exact prompt text.  Hashing rather than storing prompts
    keeps fixtures small while still failing loudly when the rendered
    prompt drifts from what was scripted.
    """

    def __init__(self, replies: dict[str, str] | None = None) -> None:
        self._replies = dict(replies or {})

    @staticmethod
    def hash_prompt(prompt: str) -> str:
        return hashlib.sha256(prompt.encode("utf-8")).hexdigest()

    @classmethod
    def from_file(cls, path) -> "MockJudgeClient":
        with open(path, "r", encoding="utf-8") as handle:
            return cls(json.load(handle))

    def script(self, prompt: str, reply: str) -> None:
        """Register the reply for one exact prompt."""
        self._replies[self.hash_prompt(prompt)] = reply

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self._replies, handle, ensure_ascii=False, indent=0, sort_keys=True)
            handle.write("\n")

    def complete(self, prompt: str) -> str:
        digest = self.hash_prompt(prompt)
        try:
            return self._replies[digest]
        except KeyError:
            raise JudgeUnavailable(
                f"no scripted reply for prompt hash {digest[:12]}..."
            ) from None


@dataclass
class StatementProvenance:
    """How one statement's labels were obtained.

    ``verification`` and ``assessment`` are ``"judge"`` when the reply
    parsed, otherwise ``"fallback: <reason>"``.
    """

    sentence_index: int
    statement_index: int
    context_ids: list[str]
    verification: str
    assessment: str


@dataclass
class ResponseAnnotation:
    """A fully judged response: labelled sentences plus provenance."""

    prompt: str
    response: str
    sentences: list[SentenceAnnotation] = field(default_factory=list)
    provenance: list[StatementProvenance] = field(default_factory=list)


def annotate_response(
    prompt: str,
    response: str,
    judge: JudgeClient,
    store: DocumentStore,
    limit: int = 3,
) -> ResponseAnnotation:
    """Run the full extraction, verification and assessment round trip.

    An extraction failure aborts: without it nothing downstream exists.
    Per-statement verification or assessment failures degrade instead of
    aborting the batch: the statement is marked Vague (assessment falls
    back to the scale midpoint) and the fallback is recorded in its
    provenance entry.
    """
    extraction_reply = judge.complete(
        render_prompts(PromptTask.EXTRACT, {"response": response})
    )
    sentences = parse_extraction(extraction_reply)

    provenance: list[StatementProvenance] = []
    for sentence in sentences:
        for position, statement in enumerate(sentence.statements):
            contexts = retrieve_contexts(statement.text, store, limit)
            materials = "\n".join(f"- {document.text}" for document in contexts)

            verification_source = "judge"
            try:
                reply = judge.complete(
                    render_prompts(
                        PromptTask.VERIFY,
                        {"materials": materials, "statement": statement.text},
                    )
                )
                label = parse_verification(reply)
            except (JudgeUnavailable, UnknownLabel) as error:
                label = VerificationLabel.VAGUE
                verification_source = f"fallback: {error}"

            assessment_source = "judge"
            try:
                reply = judge.complete(
                    render_prompts(
                        PromptTask.ASSESS,
                        {
                            "question": prompt,
                            "response": response,
                            "statement": statement.text,
                        },
                    )
                )
                info = parse_assessment(reply)
            except (JudgeUnavailable, MalformedScore, OutOfRangeScore) as error:
                info = FALLBACK_INFO_SCORE
                label = VerificationLabel.VAGUE
                assessment_source = f"fallback: {error}"

            statement.verification = label
            statement.info = info
            provenance.append(
                StatementProvenance(
                    sentence_index=sentence.index,
                    statement_index=position,
                    context_ids=[document.doc_id for document in contexts],
                    verification=verification_source,
                    assessment=assessment_source,
                )
            )

    return ResponseAnnotation(
        prompt=prompt, response=response, sentences=sentences, provenance=provenance
    )
