"""Command-line front end for the annotation and reward pipeline.

Subcommands map one-to-one onto the pipeline stages, plus ``pipeline``
to chain them:

    factreward annotate --input prompts.jsonl --corpus corpus.jsonl --output out.jsonl
    factreward reward   --input out.jsonl --preset qwen --output rewards.jsonl
    factreward eval     --input out.jsonl --output report/
    factreward pipeline --input prompts.jsonl --corpus corpus.jsonl --output run/

Settings come from an optional TOML config file; command-line flags win
over the file.  Exit codes: 0 success, 1 usage or configuration error,
2 judge service failure, 3 data-quality failure (span-resolution rate
over threshold, uncovered token offsets, empty evaluation batch).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from factreward.judge import (
    HttpJudgeClient,
    JudgeClient,
    JudgeEndpoint,
    JudgeUnavailable,
    MockJudgeClient,
)
from factreward.annotation import VerificationLabel
from factreward.metrics import EmptyBatch
from factreward.pipeline import (
    DEFAULT_SPAN_FAILURE_THRESHOLD,
    DEFAULT_WORKERS,
    MissingTokenOffsets,
    SpanFailureRateExceeded,
    check_failure_rate,
    load_token_offsets,
    read_jsonl,
    run_annotate,
    run_eval,
    run_reward,
    write_jsonl,
)
from factreward.retrieval import DEFAULT_LIMIT, DocumentStore, EmptyStore
from factreward.rewards import PRESETS, RewardConfig, UncoveredOffset

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_JUDGE = 2
EXIT_DATA_QUALITY = 3

_LABEL_KEYS = {
    "correct": VerificationLabel.CORRECT,
    "hedged_correct": VerificationLabel.HEDGED_CORRECT,
    "vague": VerificationLabel.VAGUE,
    "hedged_wrong": VerificationLabel.HEDGED_WRONG,
    "wrong": VerificationLabel.WRONG,
}


class ConfigError(ValueError):
    """Bad or missing configuration."""


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(config_path, "rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as error:
        raise ConfigError(f"malformed config file {path}: {error}") from error


def _setting(args: argparse.Namespace, config: dict, flag: str, section: str, key: str, default=None):
    """Flag value if given, else config file value, else default."""
    value = getattr(args, flag, None)
    if value is not None:
        return value
    return config.get(section, {}).get(key, default)


def _require_file(path, what: str) -> Path:
    if path is None:
        raise ConfigError(f"missing required {what}")
    resolved = Path(path)
    if not resolved.is_file():
        raise ConfigError(f"{what} not found: {path}")
    return resolved


def _custom_reward_config(table: dict) -> RewardConfig:
    try:
        f_map = {_LABEL_KEYS[key]: float(value) for key, value in table["f"].items()}
        g_map = {int(key): float(value) for key, value in table["g"].items()}
        return RewardConfig(
            name="custom",
            alpha=float(table["alpha"]),
            beta=float(table["beta"]),
            epsilon=float(table["epsilon"]),
            mu=float(table["mu"]),
            f_map=f_map,
            g_map=g_map,
        )
    except (KeyError, TypeError, ValueError) as error:
        raise ConfigError(f"invalid [reward.custom] table: {error}") from error


def _reward_config(args: argparse.Namespace, config: dict) -> RewardConfig:
    preset_flag = getattr(args, "preset", None)
    reward_section = config.get("reward", {})
    if preset_flag is not None:
        return PRESETS[preset_flag]()
    if "custom" in reward_section:
        return _custom_reward_config(reward_section["custom"])
    preset_name = reward_section.get("preset", "qwen")
    if preset_name not in PRESETS:
        raise ConfigError(
            f"unknown reward preset {preset_name!r}; choose from {sorted(PRESETS)}"
        )
    return PRESETS[preset_name]()


def _judge_client(args: argparse.Namespace, config: dict) -> JudgeClient:
    mock_path = _setting(args, config, "mock_judge", "io", "mock_judge")
    if mock_path is not None:
        return MockJudgeClient.from_file(_require_file(mock_path, "mock judge fixture"))
    judge_section = config.get("judge", {})
    if "base_url" not in judge_section or "model" not in judge_section:
        raise ConfigError(
            "no judge configured: provide --mock-judge or a [judge] section "
            "with base_url and model"
        )
    endpoint = JudgeEndpoint(
        base_url=judge_section["base_url"],
        model=judge_section["model"],
        timeout=float(judge_section.get("timeout", 30.0)),
        max_retries=int(judge_section.get("max_retries", 3)),
        temperature=float(judge_section.get("temperature", 0.0)),
    )
    return HttpJudgeClient(
        endpoint, max_in_flight=int(judge_section.get("max_in_flight", 8))
    )


def _load_store(args: argparse.Namespace, config: dict) -> DocumentStore:
    corpus = _require_file(
        _setting(args, config, "corpus", "io", "corpus"), "corpus file"
    )
    return DocumentStore.from_jsonl(corpus)


def _input_records(args: argparse.Namespace, config: dict) -> list[dict]:
    input_path = _require_file(
        _setting(args, config, "input", "io", "input"), "input file"
    )
    return read_jsonl(input_path)


def _output_path(args: argparse.Namespace, config: dict) -> Path:
    output = _setting(args, config, "output", "io", "output")
    if output is None:
        raise ConfigError("missing required output path")
    return Path(output)


def _cmd_annotate(args: argparse.Namespace, config: dict) -> int:
    records = _input_records(args, config)
    store = _load_store(args, config)
    judge = _judge_client(args, config)
    workers = int(_setting(args, config, "workers", "run", "workers", DEFAULT_WORKERS))
    limit = int(config.get("retrieval", {}).get("limit", DEFAULT_LIMIT))
    annotated = run_annotate(records, judge, store, retrieval_limit=limit, workers=workers)
    output = _output_path(args, config)
    output.parent.mkdir(parents=True, exist_ok=True)
    write_jsonl(output, annotated)
    return EXIT_OK


def _run_reward_stage(
    annotation_records: list[dict], args: argparse.Namespace, config: dict, output: Path
) -> int:
    reward_section = config.get("reward", {})
    reward_config = _reward_config(args, config)
    min_ratio = float(reward_section.get("min_ratio", 0.7))
    threshold = float(
        reward_section.get("span_failure_threshold", DEFAULT_SPAN_FAILURE_THRESHOLD)
    )
    offsets_path = _setting(args, config, "token_offsets", "io", "token_offsets")
    offsets_by_id = None
    if offsets_path is not None:
        offsets_by_id = load_token_offsets(_require_file(offsets_path, "token offsets file"))
    result = run_reward(
        annotation_records, reward_config, min_ratio=min_ratio, offsets_by_id=offsets_by_id
    )
    output.parent.mkdir(parents=True, exist_ok=True)
    # The artifact is written before the threshold check so a breach can
    # be inspected from the very records that triggered it.
    write_jsonl(output, result.records)
    check_failure_rate(result, threshold)
    return EXIT_OK


def _cmd_reward(args: argparse.Namespace, config: dict) -> int:
    return _run_reward_stage(
        _input_records(args, config), args, config, _output_path(args, config)
    )


def _cmd_eval(args: argparse.Namespace, config: dict) -> int:
    records = _input_records(args, config)
    run_eval(records, _output_path(args, config))
    return EXIT_OK


def _cmd_pipeline(args: argparse.Namespace, config: dict) -> int:
    out_dir = _output_path(args, config)
    out_dir.mkdir(parents=True, exist_ok=True)

    records = _input_records(args, config)
    store = _load_store(args, config)
    judge = _judge_client(args, config)
    workers = int(_setting(args, config, "workers", "run", "workers", DEFAULT_WORKERS))
    limit = int(config.get("retrieval", {}).get("limit", DEFAULT_LIMIT))
    annotated = run_annotate(records, judge, store, retrieval_limit=limit, workers=workers)
    write_jsonl(out_dir / "annotations.jsonl", annotated)

    status = _run_reward_stage(annotated, args, config, out_dir / "rewards.jsonl")
    run_eval(annotated, out_dir / "report")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factreward",
        description="Statement-level factuality annotation, dense rewards and evaluation.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser, *, corpus=False, judge=False,
                   reward=False, workers=False) -> None:
        sub.add_argument("--config", help="TOML config file; flags override it")
        sub.add_argument("--input", help="input file (line-delimited JSON)")
        sub.add_argument("--output", help="output file or directory")
        if corpus:
            sub.add_argument("--corpus", help="reference corpus (line-delimited JSON)")
        if judge:
            sub.add_argument(
                "--mock-judge", dest="mock_judge",
                help="scripted judge fixture instead of a live endpoint",
            )
        if reward:
            sub.add_argument(
                "--preset", choices=sorted(PRESETS),
                help="named reward configuration",
            )
            sub.add_argument(
                "--token-offsets", dest="token_offsets",
                help="per-record token offset file for token-level rewards",
            )
        if workers:
            sub.add_argument("--workers", type=int, help="concurrent annotation workers")

    annotate = subparsers.add_parser("annotate", help="judge responses into annotations")
    add_common(annotate, corpus=True, judge=True, workers=True)
    annotate.set_defaults(handler=_cmd_annotate)

    reward = subparsers.add_parser("reward", help="convert annotations into rewards")
    add_common(reward, reward=True)
    reward.set_defaults(handler=_cmd_reward)

    evaluate = subparsers.add_parser("eval", help="score annotations and write a report")
    add_common(evaluate)
    evaluate.set_defaults(handler=_cmd_eval)

    pipeline = subparsers.add_parser("pipeline", help="annotate, reward and eval in one run")
    add_common(pipeline, corpus=True, judge=True, reward=True, workers=True)
    pipeline.set_defaults(handler=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        # argparse exits 2 on usage errors; fold that into the config slot.
        return EXIT_OK if exit_request.code == 0 else EXIT_CONFIG
    try:
        config = load_config(args.config)
        return args.handler(args, config)
    except (ConfigError, EmptyStore, FileNotFoundError, KeyError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_CONFIG
    except JudgeUnavailable as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_JUDGE
    except (
        SpanFailureRateExceeded,
        MissingTokenOffsets,
        UncoveredOffset,
        EmptyBatch,
    ) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_DATA_QUALITY


if __name__ == "__main__":
    sys.exit(main())
