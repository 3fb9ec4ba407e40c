"""ReAct / Focused ReAct agent runtime (C++ core bindings)."""

from ._core import (
    TRACE_SCHEMA_VERSION,
    CoreError,
    build_initial_prompt,
    build_round_prompt,
    compare_reports,
    detect_action_loops,
    detect_duplicate,
    exact_match,
    f1_score,
    normalize_action,
    normalize_answer,
    parse_action,
    parse_model_block,
    run_scripted_episode,
    sample_tasks,
    summarize_failures,
)

__version__ = "0.1.0"

__all__ = [
    "TRACE_SCHEMA_VERSION",
    "CoreError",
    "build_initial_prompt",
    "build_round_prompt",
    "compare_reports",
    "detect_action_loops",
    "detect_duplicate",
    "exact_match",
    "f1_score",
    "normalize_action",
    "normalize_answer",
    "parse_action",
    "parse_model_block",
    "run_scripted_episode",
    "sample_tasks",
    "summarize_failures",
]
