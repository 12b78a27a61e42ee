"""Wire-format parser behaviour, error cases and round-trip stability."""

from __future__ import annotations

import random

import pytest

from factreward.annotation import (
    MalformedAnnotation,
    MalformedScore,
    OutOfRangeScore,
    UnknownLabel,
    VerificationLabel,
    parse_assessment,
    parse_extraction,
    parse_verification,
    render_extraction,
)
from fixture_data import EXAMPLE_EXTRACTION_REPLY, EXAMPLE_STATEMENT_COUNTS


def test_parse_extraction_worked_example():
    sentences = parse_extraction(EXAMPLE_EXTRACTION_REPLY)
    assert [s.index for s in sentences] == [1, 2, 3, 4]
    assert [len(s.statements) for s in sentences] == EXAMPLE_STATEMENT_COUNTS
    assert sum(len(s.statements) for s in sentences) == 7
    assert sentences[0].text == "Arthur's Magazine was likely started first."
    assert sentences[0].statements[0].text == "Arthur's Magazine was likely started first."
    assert sentences[3].statements[1].text == "Family Circle magazine was founded in 1957."
    # Freshly parsed statements carry no labels or spans yet.
    for sentence in sentences:
        for statement in sentence.statements:
            assert statement.verification is None
            assert statement.info is None
            assert statement.span is None


def test_parse_extraction_no_statements_sentinel():
    assert parse_extraction("No statements") == []
    assert parse_extraction("  No statements\n") == []


def test_parse_extraction_drops_sentences_without_statements():
    raw = (
        ">> Sentence 1: An empty framing sentence.\n"
        ">> Sentence 2: A sentence with content.\n"
        "* A checkable claim.\n"
    )
    sentences = parse_extraction(raw)
    assert [s.index for s in sentences] == [2]
    assert sentences[0].statements[0].text == "A checkable claim."


def test_parse_extraction_keeps_duplicates():
    raw = (
        ">> Sentence 1: The claim is repeated.\n"
        "* The very same claim.\n"
        "* The very same claim.\n"
    )
    sentences = parse_extraction(raw)
    assert len(sentences[0].statements) == 2


def test_parse_extraction_skips_decoration_lines():
    raw = (
        "Sure, here is the decomposition:\n"
        ">> Sentence 1: A real sentence.\n"
        "* A real claim.\n"
        "Hope this helps!\n"
    )
    sentences = parse_extraction(raw)
    assert len(sentences) == 1
    assert len(sentences[0].statements) == 1


def test_parse_extraction_statement_before_header():
    with pytest.raises(MalformedAnnotation):
        parse_extraction("* A stray claim.\n>> Sentence 1: Too late.\n")


def test_parse_extraction_non_numeric_ordinal():
    with pytest.raises(MalformedAnnotation):
        parse_extraction(">> Sentence one: Spelled out.\n* A claim.\n")


def test_parse_extraction_non_increasing_ordinals():
    raw = (
        ">> Sentence 2: Second sentence first.\n* Claim a.\n"
        ">> Sentence 1: Going backwards.\n* Claim b.\n"
    )
    with pytest.raises(MalformedAnnotation):
        parse_extraction(raw)


def test_parse_extraction_allows_ordinal_gaps():
    raw = (
        ">> Sentence 1: First.\n* Claim a.\n"
        ">> Sentence 5: Jumped ahead.\n* Claim b.\n"
    )
    assert [s.index for s in parse_extraction(raw)] == [1, 5]


def test_parse_extraction_drops_blank_statements():
    raw = ">> Sentence 1: Something.\n* \n* A kept claim.\n"
    sentences = parse_extraction(raw)
    assert [s.text for s in sentences] == ["Something."]
    assert [st.text for st in sentences[0].statements] == ["A kept claim."]


def test_render_round_trips_worked_example():
    sentences = parse_extraction(EXAMPLE_EXTRACTION_REPLY)
    assert render_extraction(sentences) == EXAMPLE_EXTRACTION_REPLY
    assert parse_extraction(render_extraction(sentences)) == sentences


def test_render_empty_uses_sentinel():
    assert render_extraction([]) == "No statements"
    assert parse_extraction(render_extraction([])) == []


def _random_text(rng: random.Random) -> str:
    words = ["alpha", "beta", "gamma", "delta", "1923", "Arthur", "magazine",
             "was", "first", ">>", "*", "Sentence", "No", "statements:"]
    count = rng.randint(1, 6)
    return " ".join(rng.choice(words) for _ in range(count))


def test_round_trip_on_fuzzed_annotations():
    rng = random.Random(1701)
    for _ in range(200):
        raw_lines = []
        ordinal = 0
        for _ in range(rng.randint(1, 5)):
            ordinal += rng.randint(1, 3)
            raw_lines.append(f">> Sentence {ordinal}: {_random_text(rng)}")
            for _ in range(rng.randint(1, 4)):
                raw_lines.append(f"* {_random_text(rng)}")
        raw = "\n".join(raw_lines)
        parsed = parse_extraction(raw)
        rendered = render_extraction(parsed)
        assert parse_extraction(rendered) == parsed


def test_parse_verification_canonical_labels_any_case():
    spellings = {
        "Correct": VerificationLabel.CORRECT,
        "Hedged Correct": VerificationLabel.HEDGED_CORRECT,
        "Vague": VerificationLabel.VAGUE,
        "Hedged Wrong": VerificationLabel.HEDGED_WRONG,
        "Wrong": VerificationLabel.WRONG,
    }
    for spelling, label in spellings.items():
        for variant in (spelling, spelling.lower(), spelling.upper(), spelling.swapcase()):
            assert parse_verification(variant) is label


def test_parse_verification_tolerates_trailing_period_and_space():
    assert parse_verification("wrong.") is VerificationLabel.WRONG
    assert parse_verification("  Correct \n") is VerificationLabel.CORRECT


def test_parse_verification_internal_space_optional():
    assert parse_verification("HedgedCorrect") is VerificationLabel.HEDGED_CORRECT
    assert parse_verification("hedged wrong.") is VerificationLabel.HEDGED_WRONG


def test_parse_verification_first_non_blank_line_wins():
    assert parse_verification("\n\nVague\nCorrect\n") is VerificationLabel.VAGUE


def test_parse_verification_unknown_label():
    for bad in ("Maybe", "Correctish", "", "   \n", "Wrong-ish"):
        with pytest.raises(UnknownLabel):
            parse_verification(bad)


def test_parse_assessment_accepts_padded_integer():
    assert parse_assessment(" 3\n") == 3
    assert parse_assessment("5") == 5
    assert parse_assessment("1 because it is useless") == 1


def test_parse_assessment_out_of_range():
    for bad in ("0", "6", "-1", "100"):
        with pytest.raises(OutOfRangeScore):
            parse_assessment(bad)


def test_parse_assessment_malformed():
    for bad in ("", "   ", "four", "4.5", "4/5"):
        with pytest.raises(MalformedScore):
            parse_assessment(bad)


def test_parsing_is_deterministic():
    assert parse_extraction(EXAMPLE_EXTRACTION_REPLY) == parse_extraction(
        EXAMPLE_EXTRACTION_REPLY
    )
