"""Command-line interface.

Subcommands: score, match, baseline, recover, dlt-guided, analyze.
LLM-backed stages read a JSON/TOML run config (--config) whose fields can
be overridden by flags; exit status is 0 only when the stage completes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import dlt, report
from .conllu import ParseError, ValidationError, parse_conllu_file
from .data import DatasetError, load_dataset, load_outcomes, save_outcomes
from .llm import QA_DECODING, REPHRASE_DECODING, LlmError
from .pipeline import (
    GapAnalysis,
    PipelineError,
    RunConfig,
    run_baseline,
    run_dlt_guided,
    run_gap_analysis,
    run_recovery,
    write_json,
    write_trace_jsonl,
)
from .treesim import MatchPoolEmptyError, find_match, write_matches_jsonl


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON or TOML run-config file")
    parser.add_argument("--dataset-path")
    parser.add_argument("--parses-path")
    parser.add_argument("--output-dir")
    parser.add_argument("--cache-dir")
    parser.add_argument("--wl-iterations", type=int)
    parser.add_argument("--k-shots", type=int)
    parser.add_argument("--threshold-quantile", type=float)
    parser.add_argument("--max-concurrency", type=int)
    parser.add_argument("--qa-endpoint")
    parser.add_argument("--qa-model")
    parser.add_argument("--qa-api-key-env")
    parser.add_argument("--rephrase-endpoint")
    parser.add_argument("--rephrase-model")
    parser.add_argument("--rephrase-api-key-env")


def _build_config(args) -> RunConfig:
    if args.config:
        path = Path(args.config)
        if path.suffix == ".toml":
            try:
                import tomllib
            except ImportError:
                import tomli as tomllib
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        else:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
    else:
        raw = {}

    for flag, key in (
        ("dataset_path", "dataset_path"),
        ("parses_path", "parses_path"),
        ("output_dir", "output_dir"),
        ("cache_dir", "cache_dir"),
        ("wl_iterations", "wl_iterations"),
        ("k_shots", "k_shots"),
        ("threshold_quantile", "threshold_quantile"),
        ("max_concurrency", "max_concurrency"),
    ):
        value = getattr(args, flag)
        if value is not None:
            raw[key] = value

    for section, defaults, prefix in (
        ("llm_qa", QA_DECODING, "qa"),
        ("llm_rephrase", REPHRASE_DECODING, "rephrase"),
    ):
        sec = dict(raw.get(section, {}))
        endpoint = getattr(args, f"{prefix}_endpoint")
        model = getattr(args, f"{prefix}_model")
        key_env = getattr(args, f"{prefix}_api_key_env")
        if endpoint is not None:
            sec["endpoint_url"] = endpoint
        if model is not None:
            sec["model_name"] = model
        if key_env is not None:
            sec["api_key_env"] = key_env
        for k, v in defaults.items():
            sec.setdefault(k, v)
        raw[section] = sec

    return RunConfig.from_dict(raw)


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dataset_label(config: RunConfig) -> str:
    tags = sorted({item.dataset for item in load_dataset(config.dataset_path)})
    return "+".join(tags)


def cmd_score(args) -> int:
    questions = parse_conllu_file(args.parses)
    breakdowns = [dlt.score(q) for q in questions]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dlt.write_breakdowns_jsonl(breakdowns, out / "dlt_scores.jsonl")
    dlt.write_summary_csv(breakdowns, out / "dlt_summary.csv")
    print(f"scored {len(breakdowns)} questions -> {out / 'dlt_scores.jsonl'}")
    return 0


def cmd_match(args) -> int:
    questions = {q.question_id: q for q in parse_conllu_file(args.parses)}
    outcomes = load_outcomes(args.outcomes)
    pool = [questions[o.question_id] for o in outcomes if o.correct and o.question_id in questions]
    matches = []
    for outcome in sorted(outcomes, key=lambda o: o.question_id):
        if outcome.correct:
            continue
        if outcome.question_id not in questions:
            raise DatasetError(f"no parse for outcome id {outcome.question_id!r}")
        matches.append(find_match(questions[outcome.question_id], pool, args.iterations))
    write_matches_jsonl(matches, args.out)
    print(f"matched {len(matches)} incorrect questions -> {args.out}")
    return 0


def cmd_baseline(args) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    records = run_baseline(config)
    path = out / "baseline_outcomes.jsonl"
    save_outcomes(path, records)
    n_correct = sum(r.correct for r in records)
    print(f"baseline: {n_correct}/{len(records)} correct -> {path}")
    return 0


def cmd_recover(args) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    baseline_path = args.baseline or out / "baseline_outcomes.jsonl"
    baseline = load_outcomes(baseline_path)
    rep, trace = run_recovery(config, baseline)
    write_json(rep.to_dict(), out / "recovery_report.json")
    write_trace_jsonl(trace, out / "recovery_trace.jsonl")
    bundle = report.ReportBundle(
        recovery_rows=(
            report.RecoveryRow(
                model=config.llm_qa.model_name,
                dataset=_dataset_label(config),
                a0=rep.a0,
                delta_a=rep.delta_a,
                a=rep.a,
                recovered=rep.recovered,
            ),
        )
    )
    report.write_bundle(bundle, out)
    print(
        f"recovered {rep.recovered}/{len(trace)} incorrect questions; "
        f"a0={rep.a0:.2f} delta_a={rep.delta_a:+.2f} a={rep.a:.2f} -> {out}"
    )
    return 0


def cmd_dlt_guided(args) -> int:
    config = _build_config(args)
    out = _out_dir(config)
    result = run_dlt_guided(config)
    write_json(result.to_dict(), out / "dlt_guided.json")
    print(
        f"tau={result.tau:.4f} subset={result.subset_size}/{result.total} "
        f"delta={result.delta:+.2f} -> {out / 'dlt_guided.json'}"
    )
    return 0


def cmd_analyze(args) -> int:
    outcomes = load_outcomes(args.outcomes)
    analysis: GapAnalysis = run_gap_analysis(outcomes)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if analysis.notice is not None:
        print(f"notice: {analysis.notice}")
        report.write_bundle(report.ReportBundle(), out)
        return 0
    means = analysis.means
    welch = analysis.welch
    bundle = report.ReportBundle(
        gap_rows=(
            report.GapRow(
                dataset=args.dataset_label,
                model=args.model_label,
                correct_mean=means.correct_mean,
                incorrect_mean=means.incorrect_mean,
                delta=means.delta,
                significant=analysis.significant,
            ),
        ),
        welch_rows=(
            report.WelchRow(
                model=args.model_label,
                dataset=args.dataset_label,
                t=welch.t_statistic,
                p=welch.p_value,
            ),
        ),
    )
    report.write_bundle(bundle, out)
    star = " (significant)" if analysis.significant else ""
    print(
        f"gap: correct={means.correct_mean:.2f} incorrect={means.incorrect_mean:.2f} "
        f"delta={means.delta:+.2f} t={welch.t_statistic:.2f} p={welch.p_value:.4g}{star} -> {out}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synloc",
        description="Syntactic-complexity scoring and rephrasing-recovery evaluation "
                    "for math word problems",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="complexity-score a CoNLL-U parse file")
    p.add_argument("--parses", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("match", help="match incorrect questions to similar correct ones")
    p.add_argument("--parses", required=True)
    p.add_argument("--outcomes", required=True)
    p.add_argument("--iterations", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_match)

    p = sub.add_parser("baseline", help="run the QA model over the dataset")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("recover", help="rephrase and re-ask incorrect baseline questions")
    _add_config_flags(p)
    p.add_argument("--baseline", help="baseline outcomes JSONL "
                                      "(default: <output_dir>/baseline_outcomes.jsonl)")
    p.set_defaults(fn=cmd_recover)

    p = sub.add_parser("dlt-guided", help="rephrase the most complex quantile and "
                                          "compare subset accuracy")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_dlt_guided)

    p = sub.add_parser("analyze", help="complexity-gap analysis over saved outcomes")
    p.add_argument("--outcomes", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--model-label", default="model")
    p.add_argument("--dataset-label", default="dataset")
    p.set_defaults(fn=cmd_analyze)

    return parser


_HANDLED = (
    ParseError, ValidationError, DatasetError, PipelineError, LlmError,
    MatchPoolEmptyError, report.ReportConsistencyError,
    FileNotFoundError, ValueError,
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except _HANDLED as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
