"""Reward mathematics, event construction and token projection.

Expected numbers are frozen literals computed independently from the
preset weight tables; they never come from the functions under test.
"""

from __future__ import annotations

import json
import math
import random

import pytest

from factreward.align import CharRange, resolve_spans
from factreward.annotation import (
    SentenceAnnotation,
    StatementAnnotation,
    VerificationLabel,
    parse_extraction,
)
from factreward.rewards import (
    EventKind,
    MissingSentenceSpan,
    RewardConfig,
    RewardEvent,
    UncoveredOffset,
    build_reward_events,
    info_reward,
    llama_preset,
    nine_digit_float,
    qwen_preset,
    read_reward_artifact,
    reward_record,
    to_token_rewards,
    token_offsets_from_pairs,
    truth_reward,
    write_reward_artifact,
)

C = VerificationLabel.CORRECT
HC = VerificationLabel.HEDGED_CORRECT
V = VerificationLabel.VAGUE
HW = VerificationLabel.HEDGED_WRONG
W = VerificationLabel.WRONG


def test_truth_reward_spec_examples():
    config = qwen_preset()
    assert truth_reward(C, 4, config) == pytest.approx(0.45, abs=1e-12)
    assert truth_reward(W, 5, config) == pytest.approx(-2.125, abs=1e-12)


def test_truth_reward_uses_magnitude_of_g():
    # g(1) is negative in both presets; the magnitude keeps a correct
    # low-value statement positive instead of flipping its sign.
    assert truth_reward(C, 1, qwen_preset()) == pytest.approx(0.09, abs=1e-12)
    assert truth_reward(C, 1, llama_preset()) == pytest.approx(0.02, abs=1e-12)


def test_info_reward_single_score():
    assert info_reward([4], qwen_preset()) == pytest.approx(
        0.8317766166719344, abs=1e-12
    )


def test_info_reward_floor():
    # Five useless statements pool to -1.0 in the qwen table, below the
    # epsilon floor of -0.9.
    expected = 1.2 * math.log(1.0 - 0.9)
    assert info_reward([1, 1, 1, 1, 1], qwen_preset()) == pytest.approx(
        expected, abs=1e-12
    )
    assert expected == pytest.approx(-2.763102111592855, abs=1e-12)


def test_info_reward_zero_when_pool_zero():
    config = RewardConfig(
        name="zeroed",
        alpha=1.0,
        beta=1.2,
        epsilon=-0.9,
        mu=1.0,
        f_map=qwen_preset().f_map,
        g_map={1: -1.0, 2: 0.0, 3: 0.0, 4: 1.0, 5: 2.0},
    )
    assert info_reward([1, 4], config) == pytest.approx(0.0, abs=1e-12)


def test_info_reward_two_statements():
    assert info_reward([4, 5], qwen_preset()) == pytest.approx(
        1.4143859956099754, abs=1e-12
    )


def test_info_reward_requires_scores():
    with pytest.raises(ValueError):
        info_reward([], qwen_preset())


def test_reward_config_validates_floor():
    with pytest.raises(ValueError):
        RewardConfig(
            name="broken",
            alpha=1.0,
            beta=1.0,
            epsilon=-1.0,
            mu=1.0,
            f_map=qwen_preset().f_map,
            g_map=qwen_preset().g_map,
        )


def test_reward_config_requires_total_maps():
    with pytest.raises(ValueError):
        RewardConfig(
            name="partial-f",
            alpha=1.0,
            beta=1.0,
            epsilon=-0.9,
            mu=1.0,
            f_map={C: 1.0},
            g_map=qwen_preset().g_map,
        )
    with pytest.raises(ValueError):
        RewardConfig(
            name="partial-g",
            alpha=1.0,
            beta=1.0,
            epsilon=-0.9,
            mu=1.0,
            f_map=qwen_preset().f_map,
            g_map={1: 0.1},
        )


def test_truth_reward_sign_follows_label():
    for config in (qwen_preset(), llama_preset()):
        for label in VerificationLabel:
            for score in (1, 2, 3, 4, 5):
                value = truth_reward(label, score, config)
                if config.f_map[label] > 0:
                    assert value > 0
                else:
                    assert value < 0


def test_info_reward_floor_and_monotonicity_sampled():
    rng = random.Random(99)
    for config in (qwen_preset(), llama_preset()):
        floor = config.beta * math.log(config.mu + config.epsilon)
        for _ in range(500):
            scores = [rng.randint(1, 5) for _ in range(rng.randint(1, 8))]
            value = info_reward(scores, config)
            assert value >= floor - 1e-12
            bump = rng.randrange(len(scores))
            if scores[bump] < 5:
                raised = list(scores)
                raised[bump] += 1
                assert info_reward(raised, config) >= value - 1e-12


def one_sentence_annotation() -> list[SentenceAnnotation]:
    sentence = SentenceAnnotation(
        index=1,
        text="Arthur's Magazine was likely started first.",
        statements=[
            StatementAnnotation(
                text="Arthur's Magazine was likely started first.",
                verification=C,
                info=4,
                span=CharRange(0, 43),
            )
        ],
        span=CharRange(0, 43),
    )
    return [sentence]


def test_build_reward_events_composed_example():
    response = "Arthur's Magazine was likely started first."
    assert len(response) == 43  # trailing period sits at offset 42
    annotation = one_sentence_annotation()
    events = build_reward_events(response, annotation, qwen_preset())
    assert [e.kind for e in events] == [EventKind.TRUTH, EventKind.INFO]
    truth, info = events
    assert truth.offset == 42
    assert truth.value == pytest.approx(0.45, abs=1e-12)
    assert info.offset == 42
    assert info.value == pytest.approx(0.8317766166719344, abs=1e-12)


def test_build_reward_events_pools_unlocatable_statements():
    response = "The moon orbits the earth."
    sentence = SentenceAnnotation(
        index=1,
        text=response,
        statements=[
            StatementAnnotation(
                text="The moon orbits the earth.",
                verification=C,
                info=4,
                span=CharRange(0, len(response)),
            ),
            StatementAnnotation(
                text="Unrelated wrong claim.",
                verification=W,
                info=5,
                span=None,
                unlocatable=True,
            ),
        ],
        span=CharRange(0, len(response)),
    )
    events = build_reward_events(response, [sentence], qwen_preset())
    truths = [e for e in events if e.kind is EventKind.TRUTH]
    infos = [e for e in events if e.kind is EventKind.INFO]
    assert len(truths) == 1  # the unlocatable statement emits no truth event
    assert len(infos) == 1
    # but its score still enters the sentence pool: g(4) + g(5) = 2.25.
    assert infos[0].value == pytest.approx(1.2 * math.log(1.0 + 2.25), abs=1e-12)


def test_build_reward_events_skips_and_reports_missing_sentence_span():
    sentence = SentenceAnnotation(
        index=1,
        text="Vanished sentence.",
        statements=[
            StatementAnnotation(text="Vanished claim.", verification=C, info=3)
        ],
        span=None,
        unlocatable=True,
    )
    with pytest.warns(MissingSentenceSpan):
        events = build_reward_events("some response", [sentence], qwen_preset())
    assert events == []


def test_build_reward_events_requires_labels():
    annotation = one_sentence_annotation()
    annotation[0].statements[0].verification = None
    with pytest.raises(ValueError):
        build_reward_events("x" * 43, annotation, qwen_preset())


def test_to_token_rewards_spec_example():
    events = [RewardEvent(offset=5, value=0.45, kind=EventKind.TRUTH)]
    offsets = token_offsets_from_pairs([[0, 2], [3, 7], [8, 10]])
    assert to_token_rewards(events, offsets) == [0.0, 0.45, 0.0]


def test_to_token_rewards_accumulates_shared_token():
    events = [
        RewardEvent(offset=4, value=0.45, kind=EventKind.TRUTH),
        RewardEvent(offset=6, value=-1.0, kind=EventKind.INFO),
    ]
    offsets = token_offsets_from_pairs([[0, 2], [3, 7]])
    assert to_token_rewards(events, offsets) == [0.0, pytest.approx(-0.55)]


def test_to_token_rewards_gap_raises():
    events = [RewardEvent(offset=2, value=1.0, kind=EventKind.TRUTH)]
    offsets = token_offsets_from_pairs([[0, 2], [3, 7]])
    with pytest.raises(UncoveredOffset):
        to_token_rewards(events, offsets)


def test_to_token_rewards_rejects_overlapping_offsets():
    with pytest.raises(ValueError):
        token_offsets_from_pairs([[0, 3], [2, 5]])


def test_to_token_rewards_empty_events():
    offsets = token_offsets_from_pairs([[0, 2], [3, 7]])
    assert to_token_rewards([], offsets) == [0.0, 0.0]


def test_token_rewards_conserve_event_mass():
    rng = random.Random(4242)
    for _ in range(100):
        token_count = rng.randint(1, 30)
        pairs = []
        cursor = 0
        for _ in range(token_count):
            cursor += rng.randint(0, 2)  # occasional gaps between tokens
            width = rng.randint(1, 4)
            pairs.append([cursor, cursor + width])
            cursor += width
        offsets = token_offsets_from_pairs(pairs)
        covered = [
            position
            for token in offsets
            for position in range(token.start, token.end)
        ]
        events = [
            RewardEvent(
                offset=rng.choice(covered),
                value=rng.uniform(-3.0, 3.0),
                kind=rng.choice([EventKind.TRUTH, EventKind.INFO]),
            )
            for _ in range(rng.randint(0, 12))
        ]
        vector = to_token_rewards(events, offsets)
        assert len(vector) == token_count
        assert sum(vector) == pytest.approx(
            sum(e.value for e in events), abs=1e-9
        )


def test_events_fall_inside_their_sentence_spans():
    # Invariant check on a span-resolved example.
    raw = (
        ">> Sentence 1: The cat sat on the mat.\n"
        "* The cat sat on the mat.\n"
        ">> Sentence 2: The dog barked loudly.\n"
        "* The dog barked loudly.\n"
    )
    response = "The cat sat on the mat. The dog barked loudly."
    annotation = parse_extraction(raw)
    for sentence in annotation:
        for statement in sentence.statements:
            statement.verification = C
            statement.info = 3
    resolved = resolve_spans(response, annotation)
    events = build_reward_events(response, resolved, llama_preset())
    spans = [sentence.span for sentence in resolved]
    for event in events:
        assert any(span.contains(event.offset) for span in spans)


def test_nine_digit_float_quantisation():
    assert nine_digit_float(0.8317766166719344) == 0.831776617
    assert nine_digit_float(0.45) == 0.45
    assert nine_digit_float(-2.125) == -2.125


def test_reward_record_field_order_and_round_trip(tmp_path):
    events = [
        RewardEvent(offset=42, value=0.45, kind=EventKind.TRUTH),
        RewardEvent(offset=42, value=0.8317766166719344, kind=EventKind.INFO),
    ]
    record = reward_record(
        record_id="r1",
        response="Arthur's Magazine was likely started first.",
        events=events,
        config_name="qwen",
        token_rewards=[0.0, 1.281776617],
    )
    assert list(record) == ["id", "response", "events", "token_rewards", "config_name"]
    assert list(record["events"][0]) == ["offset", "value", "kind"]

    without_tokens = reward_record(
        record_id="r2", response="x", events=[], config_name="qwen"
    )
    assert list(without_tokens) == ["id", "response", "events", "config_name"]

    path = tmp_path / "rewards.jsonl"
    write_reward_artifact(path, [record, without_tokens])
    loaded = read_reward_artifact(path)
    assert loaded == [
        json.loads(json.dumps(record)),
        json.loads(json.dumps(without_tokens)),
    ]
    assert loaded[0]["events"][1]["value"] == 0.831776617
