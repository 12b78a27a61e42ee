"""Reward artifact consumption for RL training loops."""

from trainer_adapter.demo import (
    DemoResult,
    TraceStep,
    toy_pg_demo,
    write_trace_csv,
)
from trainer_adapter.loader import (
    AlignedBatch,
    MissingOffsets,
    SchemaMismatch,
    UncoveredOffset,
    load_rewards,
    read_offsets,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedBatch",
    "DemoResult",
    "MissingOffsets",
    "SchemaMismatch",
    "TraceStep",
    "UncoveredOffset",
    "load_rewards",
    "read_offsets",
    "toy_pg_demo",
    "write_trace_csv",
    "__version__",
]
