"""Command-line front end: artifact plus offsets in, CSV trace out.

    trainer-adapter --artifact rewards.jsonl --offsets offsets.jsonl \
        --output trace.csv

Exit codes: 0 success, 1 usage or missing file, 2 malformed or
inconsistent data.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from trainer_adapter.demo import (
    DEFAULT_LEARNING_RATE,
    DEFAULT_STEPS,
    toy_pg_demo,
    write_trace_csv,
)
from trainer_adapter.loader import SchemaMismatch, UncoveredOffset, load_rewards

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trainer-adapter",
        description="Project a reward artifact onto token offsets and run the toy policy-gradient demo.",
    )
    parser.add_argument("--artifact", required=True, help="reward artifact (line-delimited JSON)")
    parser.add_argument("--offsets", required=True, help="token offsets file (line-delimited JSON)")
    parser.add_argument("--output", required=True, help="training trace CSV to write")
    parser.add_argument("--steps", type=int, default=DEFAULT_STEPS, help="gradient steps")
    parser.add_argument(
        "--learning-rate", type=float, default=DEFAULT_LEARNING_RATE, help="step size"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return EXIT_OK if exit_request.code == 0 else EXIT_USAGE

    for path, what in ((args.artifact, "artifact"), (args.offsets, "offsets file")):
        if not Path(path).is_file():
            print(f"error: {what} not found: {path}", file=sys.stderr)
            return EXIT_USAGE

    try:
        batches = load_rewards(args.artifact, args.offsets)
        if not batches:
            print("error: the artifact holds no records", file=sys.stderr)
            return EXIT_DATA
        result = toy_pg_demo(batches, steps=args.steps, learning_rate=args.learning_rate)
    except (SchemaMismatch, UncoveredOffset, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_DATA

    write_trace_csv(args.output, result.trace)
    final = result.trace[-1]
    print(
        f"{len(batches)} batches, {result.vocabulary_size} positions: "
        f"expected reward {result.trace[0].expected_reward:.6f} -> "
        f"{final.expected_reward:.6f} over {final.step} steps"
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
