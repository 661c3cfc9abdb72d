"""Render analysis results into table-shaped CSV/JSON files and a text summary.

Percents and means are rounded to two decimals; deltas carry an explicit
leading sign. A gap row may only be flagged significant when the matching
Welch row has p below the significance threshold.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

SIGNIFICANCE_P = 0.01

FORMATS = ("csv", "json", "text")


class ReportConsistencyError(ValueError):
    pass


@dataclass(frozen=True)
class GapRow:
    dataset: str
    model: str
    correct_mean: float | None
    incorrect_mean: float | None
    delta: float | None
    significant: bool


@dataclass(frozen=True)
class RecoveryRow:
    model: str
    dataset: str
    a0: float
    delta_a: float
    a: float
    recovered: int


@dataclass(frozen=True)
class WelchRow:
    model: str
    dataset: str
    t: float
    p: float


@dataclass(frozen=True)
class ReportBundle:
    gap_rows: tuple[GapRow, ...] = ()
    recovery_rows: tuple[RecoveryRow, ...] = ()
    welch_rows: tuple[WelchRow, ...] = ()


def _round2(value: float | None) -> float | None:
    return None if value is None else round(value, 2)


def _signed(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:+.2f}"


def check_consistency(bundle: ReportBundle, threshold: float = SIGNIFICANCE_P) -> None:
    """Refuse any gap row whose significance flag contradicts its p-value."""
    welch_by_key = {(w.model, w.dataset): w for w in bundle.welch_rows}
    for row in bundle.gap_rows:
        welch = welch_by_key.get((row.model, row.dataset))
        if welch is None:
            if row.significant:
                raise ReportConsistencyError(
                    f"gap row ({row.dataset}, {row.model}) is flagged significant "
                    "but has no Welch row"
                )
            continue
        if row.significant != (welch.p < threshold):
            raise ReportConsistencyError(
                f"gap row ({row.dataset}, {row.model}): significant={row.significant} "
                f"contradicts p={welch.p}"
            )


def _gap_dicts(bundle: ReportBundle) -> list[dict]:
    return [
        {
            "dataset": r.dataset,
            "model": r.model,
            "correct_mean": _round2(r.correct_mean),
            "incorrect_mean": _round2(r.incorrect_mean),
            "delta": _signed(r.delta),
            "significant": r.significant,
        }
        for r in bundle.gap_rows
    ]


def _recovery_dicts(bundle: ReportBundle) -> list[dict]:
    return [
        {
            "model": r.model,
            "dataset": r.dataset,
            "a0": _round2(r.a0),
            "delta_a": _round2(r.delta_a),
            "a": _round2(r.a),
            "recovered": r.recovered,
        }
        for r in bundle.recovery_rows
    ]


def _welch_dicts(bundle: ReportBundle) -> list[dict]:
    return [
        {
            "model": r.model,
            "dataset": r.dataset,
            "t": round(r.t, 4),
            "p": round(r.p, 6),
        }
        for r in bundle.welch_rows
    ]


_TABLES = {
    "gap_table": (_gap_dicts, ("dataset", "model", "correct_mean", "incorrect_mean", "delta", "significant")),
    "recovery_table": (_recovery_dicts, ("model", "dataset", "a0", "delta_a", "a", "recovered")),
    "welch_table": (_welch_dicts, ("model", "dataset", "t", "p")),
}


def _table_csv(rows: list[dict], header: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _summary_text(bundle: ReportBundle) -> str:
    lines = ["Complexity-gap and rephrasing-recovery summary", ""]
    if bundle.gap_rows:
        lines.append("Mean normalized complexity by outcome (delta = incorrect - correct):")
        for r in _gap_dicts(bundle):
            star = " *" if r["significant"] else ""
            lines.append(
                f"  {r['dataset']:<12} {r['model']:<12} correct={r['correct_mean']} "
                f"incorrect={r['incorrect_mean']} delta={r['delta']}{star}"
            )
        lines.append(f"  (* = significant at p < {SIGNIFICANCE_P})")
        lines.append("")
    if bundle.recovery_rows:
        lines.append("Accuracy after rephrasing recovery:")
        for r in _recovery_dicts(bundle):
            lines.append(
                f"  {r['model']:<12} {r['dataset']:<12} a0={r['a0']} "
                f"delta_a=+{r['delta_a']} a={r['a']} recovered={r['recovered']}"
            )
        lines.append("")
    if bundle.welch_rows:
        lines.append("Welch's t-test (correct vs incorrect complexity):")
        for r in _welch_dicts(bundle):
            lines.append(f"  {r['model']:<12} {r['dataset']:<12} t={r['t']} p={r['p']}")
        lines.append("")
    if len(lines) == 2:
        lines.append("(empty bundle)")
        lines.append("")
    return "\n".join(lines)


def render(bundle: ReportBundle, format: str = "text") -> str:
    """Serialize the whole bundle in one format.

    ``csv`` concatenates the three tables, each preceded by a ``# table:``
    comment line; per-file output goes through :func:`write_bundle`.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    check_consistency(bundle)
    if format == "json":
        payload = {name: fn(bundle) for name, (fn, _) in _TABLES.items()}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if format == "csv":
        parts = []
        for name, (fn, header) in _TABLES.items():
            parts.append(f"# table: {name}\n{_table_csv(fn(bundle), header)}")
        return "\n".join(parts)
    return _summary_text(bundle)


def write_bundle(bundle: ReportBundle, output_dir) -> list[Path]:
    """Write gap/recovery/welch tables as .csv and .json plus summary.txt."""
    check_consistency(bundle)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (fn, header) in _TABLES.items():
        rows = fn(bundle)
        csv_path = out / f"{name}.csv"
        csv_path.write_text(_table_csv(rows, header), encoding="utf-8")
        json_path = out / f"{name}.json"
        json_path.write_text(
            json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        written.extend([csv_path, json_path])
    summary = out / "summary.txt"
    summary.write_text(_summary_text(bundle), encoding="utf-8")
    written.append(summary)
    return written
