"""Parsing and rendering of statement-level factuality annotations.

A judge reply decomposes a response into sentences and atomic statements
with a line-oriented wire format:

    >> Sentence 1: Arthur's Magazine was likely started first.
    * Arthur's Magazine was likely started first.

A ``>> Sentence N:`` header opens a block; every following ``* `` line is
one atomic statement of that block.  The literal reply ``No statements``
means the response contains nothing checkable.  Sentences that end up
with zero statements carry no checkable content and are dropped.

Verification and assessment replies are single values ("Correct", "4")
with their own small parsers below.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Sequence

from factreward.align import CharRange

NO_STATEMENTS = "No statements"

_SENTENCE_RE = re.compile(r"^>> Sentence (\d+): (.*)$")
# Loose variant so headers with a broken ordinal fail loudly instead of
# being silently treated as decoration.
_SENTENCE_LOOSE_RE = re.compile(r"^>> Sentence ([^:]*): ?(.*)$")
_STATEMENT_RE = re.compile(r"^\* (.*)$")

INFO_SCALE = (1, 2, 3, 4, 5)


class MalformedAnnotation(ValueError):
    """The extraction reply does not follow the sentence/statement grammar."""


class UnknownLabel(ValueError):
    """A verification reply that is none of the recognised labels."""


class MalformedScore(ValueError):
    """An assessment reply whose leading token is not an integer."""


class OutOfRangeScore(ValueError):
    """An assessment integer outside the 1..5 scale."""


class VerificationLabel(enum.Enum):
    """Truthfulness verdict for one atomic statement.

    The hedged variants mark claims wrapped in uncertainty markers; they
    never appear with the default judge instructions but are accepted on
    the wire so a judge prompted for them is not misread.
    """

    CORRECT = "Correct"
    HEDGED_CORRECT = "Hedged Correct"
    VAGUE = "Vague"
    HEDGED_WRONG = "Hedged Wrong"
    WRONG = "Wrong"

    @property
    def counts_correct(self) -> bool:
        """Whether the label lands on the correct side of the accuracy split.

        Vague counts as incorrect: an unverifiable claim is priced as a
        failure, not ignored.
        """
        return self in (VerificationLabel.CORRECT, VerificationLabel.HEDGED_CORRECT)


# Wire spelling -> label, keyed with whitespace removed and lowercased.
_LABEL_BY_KEY = {
    "correct": VerificationLabel.CORRECT,
    "hedgedcorrect": VerificationLabel.HEDGED_CORRECT,
    "vague": VerificationLabel.VAGUE,
    "hedgedwrong": VerificationLabel.HEDGED_WRONG,
    "wrong": VerificationLabel.WRONG,
}


@dataclass
class StatementAnnotation:
    """One atomic, independently checkable claim.

    ``span`` is the claim's position in the source response once resolved;
    ``unlocatable`` is set when span resolution gave up on it.
    """

    text: str
    verification: VerificationLabel | None = None
    info: int | None = None
    span: CharRange | None = None
    unlocatable: bool = False


@dataclass
class SentenceAnnotation:
    """One sentence of the response together with its atomic statements."""

    index: int
    text: str
    statements: list[StatementAnnotation] = field(default_factory=list)
    span: CharRange | None = None
    unlocatable: bool = False


def parse_extraction(raw: str) -> list[SentenceAnnotation]:
    """Parse an extraction reply into sentence annotations.

    Sentence ordinals must strictly increase; a statement line before any
    header and a header with a non-numeric ordinal are both malformed.
    Lines matching neither pattern are judge decoration and are skipped.
    Statements that are empty after trimming are dropped, and sentences
    left without statements are dropped with them.
    """
    if raw.strip() == NO_STATEMENTS:
        return []

    sentences: list[SentenceAnnotation] = []
    current: SentenceAnnotation | None = None
    last_index: int | None = None
    for line in raw.splitlines():
        statement = _STATEMENT_RE.match(line)
        if statement is not None:
            if current is None:
                raise MalformedAnnotation(
                    f"statement line before any sentence header: {line!r}"
                )
            text = statement.group(1).strip()
            if text:
                current.statements.append(StatementAnnotation(text=text))
            continue
        header = _SENTENCE_RE.match(line)
        if header is not None:
            index = int(header.group(1))
            if last_index is not None and index <= last_index:
                raise MalformedAnnotation(
                    f"sentence ordinal {index} does not increase past {last_index}"
                )
            last_index = index
            current = SentenceAnnotation(index=index, text=header.group(2).strip())
            sentences.append(current)
            continue
        loose = _SENTENCE_LOOSE_RE.match(line)
        if loose is not None:
            raise MalformedAnnotation(
                f"sentence header with non-numeric ordinal: {line!r}"
            )
        # Anything else is decoration around the annotation proper.

    return [sentence for sentence in sentences if sentence.statements]


def render_extraction(annotation: Sequence[SentenceAnnotation]) -> str:
    """Render annotations back onto the wire format.

    Inverse of :func:`parse_extraction` up to whitespace trimming; an
    empty annotation renders as the ``No statements`` sentinel.
    """
    if not annotation:
        return NO_STATEMENTS
    lines = []
    for sentence in annotation:
        lines.append(f">> Sentence {sentence.index}: {sentence.text}")
        for statement in sentence.statements:
            lines.append(f"* {statement.text}")
    return "\n".join(lines)


def parse_verification(raw: str) -> VerificationLabel:
    """Parse a verification reply into a label.

    Only the first non-blank line counts.  Matching is case-insensitive,
    tolerates one trailing period and accepts the hedged labels with or
    without their internal space, so "wrong." and "HedgedCorrect" both
    parse.  Anything else raises :class:`UnknownLabel` rather than
    silently poisoning downstream rewards.
    """
    first = ""
    for line in raw.splitlines():
        if line.strip():
            first = line.strip()
            break
    if not first:
        raise UnknownLabel("empty verification reply")
    trimmed = first[:-1] if first.endswith(".") else first
    key = "".join(trimmed.lower().split())
    try:
        return _LABEL_BY_KEY[key]
    except KeyError:
        raise UnknownLabel(f"unrecognised verification label: {first!r}") from None


def parse_assessment(raw: str) -> int:
    """Parse an assessment reply into an informativeness score in 1..5."""
    tokens = raw.split()
    if not tokens:
        raise MalformedScore("empty assessment reply")
    try:
        score = int(tokens[0])
    except ValueError:
        raise MalformedScore(f"assessment is not an integer: {tokens[0]!r}") from None
    if score not in INFO_SCALE:
        raise OutOfRangeScore(f"assessment {score} outside the 1..5 scale")
    return score
