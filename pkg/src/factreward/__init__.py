"""Statement-level factuality annotation and token-level dense rewards.

The package turns free-form LLM responses into fine-grained training
signal: a judge model decomposes each response into atomic statements
and labels their truthfulness and informativeness, the labels become
character-anchored reward events, and the events project onto any
tokenisation as dense per-token rewards.  An evaluator summarises the
same annotations into accuracy and responsiveness metrics.
"""

from factreward.align import (
    AlignmentResult,
    CharRange,
    NoAlignment,
    lcs_locate,
    resolve_spans,
    substring_locate,
)
from factreward.annotation import (
    MalformedAnnotation,
    MalformedScore,
    OutOfRangeScore,
    SentenceAnnotation,
    StatementAnnotation,
    UnknownLabel,
    VerificationLabel,
    parse_assessment,
    parse_extraction,
    parse_verification,
    render_extraction,
)
from factreward.judge import (
    HttpJudgeClient,
    JudgeEndpoint,
    JudgeUnavailable,
    MockJudgeClient,
    ResponseAnnotation,
    StatementProvenance,
    annotate_response,
)
from factreward.metrics import (
    DatasetMetrics,
    EmptyBatch,
    ResponseMetrics,
    aggregate,
    score_response,
)
from factreward.prompts import MissingSlot, PromptTask, render_prompts
from factreward.retrieval import Document, DocumentStore, EmptyStore, retrieve_contexts
from factreward.rewards import (
    EventKind,
    MissingSentenceSpan,
    RewardConfig,
    RewardEvent,
    UncoveredOffset,
    build_reward_events,
    info_reward,
    llama_preset,
    qwen_preset,
    to_token_rewards,
    truth_reward,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "CharRange",
    "DatasetMetrics",
    "Document",
    "DocumentStore",
    "EmptyBatch",
    "EmptyStore",
    "EventKind",
    "HttpJudgeClient",
    "JudgeEndpoint",
    "JudgeUnavailable",
    "MalformedAnnotation",
    "MalformedScore",
    "MissingSentenceSpan",
    "MissingSlot",
    "MockJudgeClient",
    "NoAlignment",
    "OutOfRangeScore",
    "PromptTask",
    "ResponseAnnotation",
    "ResponseMetrics",
    "RewardConfig",
    "RewardEvent",
    "SentenceAnnotation",
    "StatementAnnotation",
    "StatementProvenance",
    "UncoveredOffset",
    "UnknownLabel",
    "VerificationLabel",
    "aggregate",
    "annotate_response",
    "build_reward_events",
    "info_reward",
    "lcs_locate",
    "llama_preset",
    "parse_assessment",
    "parse_extraction",
    "parse_verification",
    "qwen_preset",
    "render_extraction",
    "render_prompts",
    "resolve_spans",
    "retrieve_contexts",
    "score_response",
    "substring_locate",
    "to_token_rewards",
    "truth_reward",
]
