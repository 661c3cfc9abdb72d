"""Syntactic-complexity scoring and rephrasing-recovery evaluation for
math word problems.

Questions arrive as CoNLL-U dependency parses, get locality-based
complexity scores, are matched to structurally similar peers with a
label-refinement graph kernel, and can be rewritten by an LLM toward a
matched structure; recovery and complexity-gap statistics close the loop.
"""

from ._native import KERNEL_LANE
from .conllu import (
    ParseError,
    QuestionParse,
    Sentence,
    Token,
    ValidationError,
    parse_conllu,
    parse_conllu_file,
    serialize,
)
from .data import OutcomeRecord, QuestionItem, load_dataset, load_outcomes, save_outcomes
from .dlt import (
    DltBreakdown,
    discourse_cost,
    integration_cost,
    is_referent,
    score,
    storage_cost,
)
from .llm import LlmConfig, call_llm, make_client
from .pipeline import (
    RunConfig,
    run_baseline,
    run_dlt_guided,
    run_gap_analysis,
    run_recovery,
)
from .rephrase import answers_equal, build_prompt, extract_answer
from .stats import (
    GroupMeans,
    RecoveryReport,
    WelchResult,
    group_means,
    percentile,
    recovery_report,
    welch_t,
)
from .treesim import LabeledGraph, MatchResult, find_match, to_graph, wl_kernel, wl_similarity

__version__ = "0.1.0"

__all__ = [
    "KERNEL_LANE",
    "ParseError",
    "QuestionParse",
    "Sentence",
    "Token",
    "ValidationError",
    "parse_conllu",
    "parse_conllu_file",
    "serialize",
    "OutcomeRecord",
    "QuestionItem",
    "load_dataset",
    "load_outcomes",
    "save_outcomes",
    "DltBreakdown",
    "discourse_cost",
    "integration_cost",
    "is_referent",
    "score",
    "storage_cost",
    "LlmConfig",
    "call_llm",
    "make_client",
    "RunConfig",
    "run_baseline",
    "run_dlt_guided",
    "run_gap_analysis",
    "run_recovery",
    "answers_equal",
    "build_prompt",
    "extract_answer",
    "GroupMeans",
    "RecoveryReport",
    "WelchResult",
    "group_means",
    "percentile",
    "recovery_report",
    "welch_t",
    "LabeledGraph",
    "MatchResult",
    "find_match",
    "to_graph",
    "wl_kernel",
    "wl_similarity",
    "__version__",
]
