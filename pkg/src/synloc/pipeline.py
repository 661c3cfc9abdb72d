"""Experiment orchestration: baseline QA, rephrasing recovery, the
complexity-gated rephrasing variant, and the complexity-gap analysis.

Stages are sequential; within a stage LLM calls run in a bounded thread
pool and all outputs are ordered by question_id, so results (and emitted
files) are deterministic for a fixed cache state.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import dlt
from .conllu import parse_conllu_file
from .data import OutcomeRecord, join_questions, load_dataset
from .llm import LlmClient, LlmConfig, LlmError, make_client
from .rephrase import answers_equal, build_prompt, extract_answer, load_default_exemplars
from .stats import GroupMeans, RecoveryReport, WelchResult, group_means, recovery_report, welch_t
from .treesim import MatchPoolEmptyError, find_match

log = logging.getLogger(__name__)

QA_INSTRUCTION = (
    "Solve the math word problem. Think step by step, then give only the "
    "final numeric answer on the last line in the form '#### <answer>'."
)


class PipelineError(ValueError):
    pass


def qa_prompt(question_text: str) -> str:
    return f"{QA_INSTRUCTION}\n\nQuestion: {question_text}\nAnswer:"


@dataclass
class RunConfig:
    dataset_path: str
    parses_path: str
    llm_qa: LlmConfig
    llm_rephrase: LlmConfig
    output_dir: str
    wl_iterations: int = 3
    k_shots: int = 3
    threshold_quantile: float = 75.0
    cache_dir: str | None = None
    max_concurrency: int = 4

    def __post_init__(self):
        for label, path in (("dataset_path", self.dataset_path),
                            ("parses_path", self.parses_path)):
            if not Path(path).exists():
                raise FileNotFoundError(f"{label} does not exist: {path}")
        if self.wl_iterations < 1:
            raise ValueError("wl_iterations must be >= 1")
        if self.k_shots < 0:
            raise ValueError("k_shots must be >= 0")
        if not 0 < self.threshold_quantile < 100:
            raise ValueError("threshold_quantile must lie strictly between 0 and 100")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")

    def resolved_cache_dir(self) -> str:
        if self.cache_dir is not None:
            return self.cache_dir
        return str(Path(self.output_dir) / "llm_cache")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        if path.suffix == ".json":
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        elif path.suffix == ".toml":
            try:
                import tomllib  # Python >= 3.11
            except ImportError:
                import tomli as tomllib
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        else:
            raise PipelineError(f"config must be .json or .toml, got {path.suffix!r}")
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        data = dict(raw)
        try:
            data["llm_qa"] = LlmConfig(**data["llm_qa"])
            data["llm_rephrase"] = LlmConfig(**data["llm_rephrase"])
        except KeyError as exc:
            raise PipelineError(f"config missing section {exc.args[0]!r}") from None
        except TypeError as exc:
            raise PipelineError(f"invalid LLM config: {exc}") from None
        try:
            return cls(**data)
        except TypeError as exc:
            raise PipelineError(f"invalid config: {exc}") from None


@dataclass(frozen=True)
class TraceRow:
    """One recovery attempt for one incorrect baseline question."""

    incorrect_id: str
    match_id: str
    similarity: float
    rephrased_text: str
    new_answer: float | None
    recovered: bool
    rephrased_dlt_normalized: float | None = None

    def to_dict(self) -> dict:
        return {
            "incorrect_id": self.incorrect_id,
            "match_id": self.match_id,
            "similarity": self.similarity,
            "rephrased_text": self.rephrased_text,
            "new_answer": self.new_answer,
            "recovered": self.recovered,
            "rephrased_dlt_normalized": self.rephrased_dlt_normalized,
        }


@dataclass(frozen=True)
class GuidedResult:
    """Threshold and accuracy change of the complexity-gated variant."""

    tau: float
    delta: float
    acc_orig: float
    acc_reph: float
    subset_size: int
    total: int

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "delta": self.delta,
            "acc_orig": self.acc_orig,
            "acc_reph": self.acc_reph,
            "subset_size": self.subset_size,
            "total": self.total,
        }


@dataclass(frozen=True)
class GapAnalysis:
    means: GroupMeans | None
    welch: WelchResult | None
    significant: bool | None
    notice: str | None = None


def _complete_many(client: LlmClient, prompts, max_workers: int):
    """Batch completions; per-item failures come back as None."""

    def one(prompt):
        try:
            return client.complete(prompt)
        except LlmError as exc:
            log.warning("completion failed: %s", exc)
            return None

    if len(prompts) <= 1 or max_workers == 1:
        return [one(p) for p in prompts]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, prompts))


def _load_joined(config: RunConfig):
    items = load_dataset(config.dataset_path)
    parses = parse_conllu_file(config.parses_path)
    return join_questions(items, parses)


def _score_all(joined) -> dict[str, dlt.DltBreakdown]:
    return {qid: dlt.score(parse) for qid, (_, parse) in joined.items()}


def run_baseline(config: RunConfig, qa_client: LlmClient | None = None) -> list[OutcomeRecord]:
    """Ask the model every question once and record scored outcomes.

    Individual LLM failures become records with no answer (counted as
    incorrect); they never abort the batch.
    """
    joined = _load_joined(config)
    breakdowns = _score_all(joined)
    client = qa_client or make_client(config.llm_qa, cache_dir=config.resolved_cache_dir())
    ids = sorted(joined)
    prompts = [qa_prompt(joined[qid][0].question_text) for qid in ids]
    completions = _complete_many(client, prompts, config.max_concurrency)
    records = []
    for qid, completion in zip(ids, completions):
        item, _ = joined[qid]
        answer = extract_answer(completion) if completion is not None else None
        correct = answer is not None and answers_equal(answer, item.gold_answer)
        b = breakdowns[qid]
        records.append(
            OutcomeRecord(
                question_id=qid,
                model_answer=answer,
                correct=correct,
                dlt_total=b.total,
                dlt_normalized=b.normalized,
                phase="baseline",
            )
        )
    return records


def _exemplars(config: RunConfig):
    if config.k_shots == 0:
        return []
    pairs = load_default_exemplars()
    if config.k_shots > len(pairs):
        log.warning("k_shots=%d but only %d exemplars shipped; using all of them",
                    config.k_shots, len(pairs))
    return pairs[: config.k_shots]


def _pools_by_dataset(joined, correct_ids):
    """Match pools never cross dataset boundaries."""
    pools: dict[str, list] = {}
    for qid in correct_ids:
        item, parse = joined[qid]
        pools.setdefault(item.dataset, []).append(parse)
    return pools


def run_recovery(
    config: RunConfig,
    baseline: list[OutcomeRecord],
    qa_client: LlmClient | None = None,
    rephrase_client: LlmClient | None = None,
    rephrased_parser=None,
) -> tuple[RecoveryReport, list[TraceRow]]:
    """Match, rephrase, and re-ask every incorrect baseline question.

    ``rephrased_parser``, when given, maps rephrased text to a
    QuestionParse so the trace can carry the post-rewrite complexity
    score; without it that trace field stays None.
    """
    joined = _load_joined(config)
    by_id = {r.question_id: r for r in baseline}
    missing = sorted(set(by_id) - set(joined))
    if missing:
        raise PipelineError(f"baseline records without questions: {missing}")
    total = len(baseline)
    if total == 0:
        raise PipelineError("baseline is empty")
    correct_ids = sorted(qid for qid, r in by_id.items() if r.correct)
    incorrect_ids = sorted(qid for qid, r in by_id.items() if not r.correct)
    a0 = 100.0 * len(correct_ids) / total
    if not incorrect_ids:
        return recovery_report(0, total, a0), []
    if not correct_ids:
        raise MatchPoolEmptyError("baseline has no correct answers to match against")

    cache_dir = config.resolved_cache_dir()
    qa = qa_client or make_client(config.llm_qa, cache_dir=cache_dir)
    rephraser = rephrase_client or make_client(config.llm_rephrase, cache_dir=cache_dir)
    exemplars = _exemplars(config)
    pools = _pools_by_dataset(joined, correct_ids)

    matches = []
    for qid in incorrect_ids:
        item, parse = joined[qid]
        pool = pools.get(item.dataset)
        if not pool:
            raise MatchPoolEmptyError(
                f"no correct questions in dataset {item.dataset!r} "
                f"to match question {qid!r}"
            )
        matches.append(find_match(parse, pool, config.wl_iterations))

    rephrase_prompts = [
        build_prompt(joined[qid][0].question_text, joined[m.match_id][0].question_text, exemplars)
        for qid, m in zip(incorrect_ids, matches)
    ]
    rephrasings = _complete_many(rephraser, rephrase_prompts, config.max_concurrency)
    rephrased_texts = [(c or "").strip() for c in rephrasings]

    retry_ids = [qid for qid, text in zip(incorrect_ids, rephrased_texts) if text]
    qa_prompts = [
        qa_prompt(text) for text in rephrased_texts if text
    ]
    qa_completions = _complete_many(qa, qa_prompts, config.max_concurrency)
    answers = dict(zip(retry_ids, qa_completions))

    trace: list[TraceRow] = []
    recovered_count = 0
    for qid, match, text in zip(incorrect_ids, matches, rephrased_texts):
        item, _ = joined[qid]
        if not text:
            log.warning("rephrasing failed for question %s; counted unrecovered", qid)
            new_answer = None
            recovered = False
        else:
            completion = answers.get(qid)
            new_answer = extract_answer(completion) if completion is not None else None
            recovered = new_answer is not None and answers_equal(new_answer, item.gold_answer)
        rephrased_dlt = None
        if rephrased_parser is not None and text:
            rephrased_dlt = dlt.score(rephrased_parser(text)).normalized
        recovered_count += int(recovered)
        trace.append(
            TraceRow(
                incorrect_id=qid,
                match_id=match.match_id,
                similarity=match.similarity,
                rephrased_text=text,
                new_answer=new_answer,
                recovered=recovered,
                rephrased_dlt_normalized=rephrased_dlt,
            )
        )
    return recovery_report(recovered_count, total, a0), trace


def complexity_cut(scores: dict[str, float], quantile: float) -> tuple[float, list[str]]:
    """Retain the most complex (1 - quantile/100) fraction, expanded to ties.

    tau is the smallest retained score, so the retained set is exactly
    ``{id: score >= tau}``. A constant score distribution retains every
    question.
    """
    if not scores:
        raise PipelineError("complexity cut over an empty score distribution")
    if not 0 < quantile < 100:
        raise ValueError("quantile must lie strictly between 0 and 100")
    ordered = sorted(scores.values())
    n = len(ordered)
    rank = math.ceil(quantile / 100.0 * n)  # questions below the cut
    tau = ordered[min(rank, n - 1)]
    subset = sorted(qid for qid, s in scores.items() if s >= tau)
    if not subset:
        raise PipelineError(
            f"degenerate score distribution: no scores >= tau={tau} "
            f"(min={ordered[0]}, max={ordered[-1]}, n={n})"
        )
    return tau, subset


def run_dlt_guided(
    config: RunConfig,
    qa_client: LlmClient | None = None,
    rephrase_client: LlmClient | None = None,
) -> GuidedResult:
    """Gate on the complexity threshold, rephrase the complex subset, and
    compare subset accuracy before and after rewriting."""
    joined = _load_joined(config)
    breakdowns = _score_all(joined)
    scores = {qid: b.normalized for qid, b in breakdowns.items()}

    cache_dir = config.resolved_cache_dir()
    qa = qa_client or make_client(config.llm_qa, cache_dir=cache_dir)
    rephraser = rephrase_client or make_client(config.llm_rephrase, cache_dir=cache_dir)

    all_ids = sorted(joined)
    completions = _complete_many(
        qa, [qa_prompt(joined[qid][0].question_text) for qid in all_ids],
        config.max_concurrency,
    )
    correct: dict[str, bool] = {}
    for qid, completion in zip(all_ids, completions):
        answer = extract_answer(completion) if completion is not None else None
        correct[qid] = answer is not None and answers_equal(answer, joined[qid][0].gold_answer)

    tau, subset = complexity_cut(scores, config.threshold_quantile)
    acc_orig = 100.0 * sum(correct[qid] for qid in subset) / len(subset)

    correct_ids = [qid for qid in all_ids if correct[qid]]
    pools = _pools_by_dataset(joined, correct_ids)
    exemplars = _exemplars(config)

    prompts: dict[str, str] = {}
    for qid in subset:
        item, parse = joined[qid]
        pool = [p for p in pools.get(item.dataset, []) if p.question_id != qid]
        if not pool:
            log.warning(
                "no match candidates for question %s; evaluating original text", qid
            )
            continue
        match = find_match(parse, pool, config.wl_iterations)
        prompts[qid] = build_prompt(
            item.question_text, joined[match.match_id][0].question_text, exemplars
        )

    prompt_ids = sorted(prompts)
    rephrasings = _complete_many(
        rephraser, [prompts[qid] for qid in prompt_ids], config.max_concurrency
    )
    rephrased: dict[str, str] = {}
    for qid, completion in zip(prompt_ids, rephrasings):
        text = (completion or "").strip()
        if text:
            rephrased[qid] = text
        else:
            log.warning("rephrasing failed for question %s; evaluating original text", qid)

    eval_texts = [rephrased.get(qid, joined[qid][0].question_text) for qid in subset]
    reph_completions = _complete_many(
        qa, [qa_prompt(text) for text in eval_texts], config.max_concurrency
    )
    hits = 0
    for qid, completion in zip(subset, reph_completions):
        answer = extract_answer(completion) if completion is not None else None
        hits += int(answer is not None and answers_equal(answer, joined[qid][0].gold_answer))
    acc_reph = 100.0 * hits / len(subset)

    return GuidedResult(
        tau=tau,
        delta=acc_reph - acc_orig,
        acc_orig=acc_orig,
        acc_reph=acc_reph,
        subset_size=len(subset),
        total=len(all_ids),
    )


def run_gap_analysis(outcomes: list[OutcomeRecord]) -> GapAnalysis:
    """Compare normalized complexity of correct vs incorrect outcomes."""
    if not outcomes:
        return GapAnalysis(means=None, welch=None, significant=None,
                           notice="no outcomes to analyze")
    means = group_means(outcomes)
    if means.correct_n < 2 or means.incorrect_n < 2:
        return GapAnalysis(
            means=means, welch=None, significant=None,
            notice=(
                "analysis skipped: need at least 2 records per group "
                f"(correct n={means.correct_n}, incorrect n={means.incorrect_n})"
            ),
        )
    correct_scores = [o.dlt_normalized for o in outcomes if o.correct]
    incorrect_scores = [o.dlt_normalized for o in outcomes if not o.correct]
    welch = welch_t(correct_scores, incorrect_scores)
    return GapAnalysis(means=means, welch=welch, significant=welch.p_value < 0.01)


def write_trace_jsonl(trace: list[TraceRow], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in trace:
            fh.write(json.dumps(row.to_dict(), sort_keys=True))
            fh.write("\n")


def write_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
