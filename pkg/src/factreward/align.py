"""Character-level alignment of annotation text against the source response.

Judges quote sentences and statements back with small edits (normalised
whitespace, resolved pronouns, dropped hedges), so exact search is not
enough.  Two locators cover the two cases:

- ``substring_locate``: longest common substring, used to pin a quoted
  sentence to its position in the response.
- ``lcs_locate``: longest common subsequence, used to pin a paraphrased
  statement inside the stretch its sentence matched.

All offsets count Unicode characters of the haystack string, not bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from factreward.annotation import SentenceAnnotation

DEFAULT_MIN_RATIO = 0.7


class NoAlignment(ValueError):
    """The two strings share nothing the locator could anchor to."""


@dataclass(frozen=True)
class CharRange:
    """Half-open character interval ``[start, end)`` in a reference string."""

    start: int
    end: int

    def __post_init__(self) -> None:
        # Empty and negative ranges are never meaningful anchors.
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"invalid character range [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def shifted(self, offset: int) -> "CharRange":
        """Rebase the range by ``offset`` characters."""
        return CharRange(self.start + offset, self.end + offset)

    def contains(self, position: int) -> bool:
        return self.start <= position < self.end


@dataclass(frozen=True)
class AlignmentResult:
    """Where a needle landed in a haystack and how much of it matched.

    ``span`` runs from the first to one past the last matched haystack
    character.  ``matched`` counts matched characters and ``ratio`` is
    ``matched / len(needle)``.
    """

    span: CharRange
    matched: int
    ratio: float


def lcs_locate(needle: str, haystack: str) -> AlignmentResult:
    """Locate ``needle`` in ``haystack`` by longest common subsequence.

    Among equal-length alignments the leftmost-ending one wins; within
    that, matches are taken as early as possible.  Raises
    :class:`NoAlignment` when the strings share no characters at all.
    """
    if not needle or not haystack:
        raise ValueError("lcs_locate requires non-empty strings")
    n, m = len(needle), len(haystack)

    # prefix[j] = subsequence length achievable against haystack[:j].
    prev = [0] * (m + 1)
    for ch in needle:
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if ch == haystack[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                left, up = cur[j - 1], prev[j]
                cur[j] = left if left >= up else up
        prev = cur
    total = prev[m]
    if total == 0:
        raise NoAlignment(f"no common subsequence between {needle!r} and {haystack!r}")

    # Shortest prefix that still fits a full-length alignment; every optimal
    # alignment inside it must use the prefix's final character, so this
    # pins the leftmost possible end.
    cut = next(j for j in range(m + 1) if prev[j] == total)

    # suf[i][j] = subsequence length of needle[i:] vs haystack[j:cut].
    suf = [[0] * (cut + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = suf[i], suf[i + 1]
        ci = needle[i]
        for j in range(cut - 1, -1, -1):
            if ci == haystack[j]:
                row[j] = below[j + 1] + 1
            else:
                a, b = row[j + 1], below[j]
                row[j] = a if a >= b else b

    # Greedy reconstruction: take a match whenever it keeps the optimum,
    # otherwise prefer discarding a needle character so the haystack
    # cursor stays as far left as possible.
    i = j = 0
    first = last = -1
    while i < n and j < cut and suf[i][j] > 0:
        if needle[i] == haystack[j] and suf[i][j] == suf[i + 1][j + 1] + 1:
            if first < 0:
                first = j
            last = j
            i += 1
            j += 1
        elif suf[i + 1][j] == suf[i][j]:
            i += 1
        else:
            j += 1

    return AlignmentResult(
        span=CharRange(first, last + 1), matched=total, ratio=total / n
    )


def substring_locate(needle: str, haystack: str) -> AlignmentResult:
    """Locate the longest contiguous stretch shared by both strings.

    Ties between equal-length stretches break toward the smallest
    haystack start offset.
    """
    if not needle or not haystack:
        raise ValueError("substring_locate requires non-empty strings")
    n, m = len(needle), len(haystack)

    best = 0
    best_start = 0
    # prev[j] = length of the common suffix of needle[:i] and haystack[:j].
    prev = [0] * (m + 1)
    for i in range(1, n + 1):
        cur = [0] * (m + 1)
        ci = needle[i - 1]
        for j in range(1, m + 1):
            if ci == haystack[j - 1]:
                run = prev[j - 1] + 1
                cur[j] = run
                start = j - run
                if run > best or (run == best and start < best_start):
                    best, best_start = run, start
        prev = cur

    if best == 0:
        raise NoAlignment(f"no common substring between {needle!r} and {haystack!r}")
    return AlignmentResult(
        span=CharRange(best_start, best_start + best), matched=best, ratio=best / n
    )


def resolve_spans(
    response: str,
    annotation: Sequence["SentenceAnnotation"],
    min_ratio: float = DEFAULT_MIN_RATIO,
) -> list["SentenceAnnotation"]:
    """Resolve sentence and statement positions inside the response text.

    Sentences are pinned by longest common substring against the whole
    response; statements by longest common subsequence inside the stretch
    their sentence matched, then rebased to absolute response offsets.
    Anything matching below ``min_ratio`` keeps an empty span and is
    flagged unlocatable; nothing is dropped, so callers decide what a
    failed match means.  The input annotation is not mutated.
    """
    from dataclasses import replace

    if not 0.0 < min_ratio <= 1.0:
        raise ValueError(f"min_ratio must be in (0, 1], got {min_ratio}")

    resolved = []
    for sentence in annotation:
        located = None
        if response:
            try:
                located = substring_locate(sentence.text, response)
            except NoAlignment:
                located = None
        if located is None or located.ratio < min_ratio:
            # Without a sentence anchor the statements have nothing to be
            # relative to, so their spans stay empty as well.
            resolved.append(
                replace(
                    sentence,
                    span=None,
                    unlocatable=True,
                    statements=[
                        replace(stmt, span=None) for stmt in sentence.statements
                    ],
                )
            )
            continue

        segment = response[located.span.start : located.span.end]
        statements = []
        for stmt in sentence.statements:
            try:
                hit = lcs_locate(stmt.text, segment)
            except NoAlignment:
                hit = None
            if hit is None or hit.ratio < min_ratio:
                statements.append(replace(stmt, span=None, unlocatable=True))
            else:
                statements.append(
                    replace(
                        stmt,
                        span=hit.span.shifted(located.span.start),
                        unlocatable=False,
                    )
                )
        resolved.append(
            replace(
                sentence, span=located.span, unlocatable=False, statements=statements
            )
        )
    return resolved
