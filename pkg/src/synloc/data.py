"""Benchmark question sets and outcome-record persistence (JSONL)."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .conllu import QuestionParse

OUTCOMES_VERSION = 1
PHASES = ("baseline", "rephrased")


class DatasetError(ValueError):
    pass


class FormatVersionError(ValueError):
    pass


@dataclass(frozen=True)
class QuestionItem:
    question_id: str
    question_text: str
    gold_answer: float
    dataset: str = "default"


@dataclass(frozen=True)
class OutcomeRecord:
    question_id: str
    model_answer: float | None
    correct: bool
    dlt_total: int
    dlt_normalized: float
    phase: str

    def __post_init__(self):
        if self.phase not in PHASES:
            raise ValueError(f"phase must be one of {PHASES}, got {self.phase!r}")
        if self.model_answer is None and self.correct:
            raise ValueError("a record without a model answer cannot be correct")

    def to_dict(self) -> dict:
        return {
            "v": OUTCOMES_VERSION,
            "question_id": self.question_id,
            "model_answer": self.model_answer,
            "correct": self.correct,
            "dlt_total": self.dlt_total,
            "dlt_normalized": self.dlt_normalized,
            "phase": self.phase,
        }


def _coerce_answer(value, line_number: int) -> float:
    if isinstance(value, bool) or value is None:
        raise DatasetError(f"line {line_number}: answer must be numeric, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.replace(",", "").strip())
        except ValueError:
            raise DatasetError(
                f"line {line_number}: answer {value!r} is not numeric"
            ) from None
    raise DatasetError(f"line {line_number}: answer must be numeric, got {value!r}")


def load_dataset(path) -> list[QuestionItem]:
    """Read question items from JSONL with fields id, question, answer.

    An optional ``dataset`` field tags the benchmark; ids must be unique
    within the file.
    """
    items: list[QuestionItem] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_number}: invalid JSON ({exc.msg})") from None
            try:
                qid = str(obj["id"])
                text = obj["question"]
                answer = obj["answer"]
            except KeyError as exc:
                raise DatasetError(
                    f"line {line_number}: missing field {exc.args[0]!r}"
                ) from None
            if qid in seen:
                raise DatasetError(f"line {line_number}: duplicate question id {qid!r}")
            seen.add(qid)
            items.append(
                QuestionItem(
                    question_id=qid,
                    question_text=text,
                    gold_answer=_coerce_answer(answer, line_number),
                    dataset=str(obj.get("dataset", "default")),
                )
            )
    return items


def save_outcomes(path, records) -> None:
    """Single-writer JSONL dump; one record per line in input order."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True))
            fh.write("\n")


def load_outcomes(path) -> list[OutcomeRecord]:
    records: list[OutcomeRecord] = []
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_number}: invalid JSON ({exc.msg})") from None
            version = obj.get("v")
            if version != OUTCOMES_VERSION:
                raise FormatVersionError(
                    f"line {line_number}: outcome format version {version!r} "
                    f"not supported (expected {OUTCOMES_VERSION})"
                )
            records.append(
                OutcomeRecord(
                    question_id=obj["question_id"],
                    model_answer=obj["model_answer"],
                    correct=obj["correct"],
                    dlt_total=obj["dlt_total"],
                    dlt_normalized=obj["dlt_normalized"],
                    phase=obj["phase"],
                )
            )
    return records


def join_questions(
    items: list[QuestionItem], parses: list[QuestionParse]
) -> dict[str, tuple[QuestionItem, QuestionParse]]:
    """Pair every question item with its parse; abort on any dangling id."""
    by_id_items = {item.question_id: item for item in items}
    by_id_parses: dict[str, QuestionParse] = {}
    for parse in parses:
        if parse.question_id in by_id_parses:
            raise DatasetError(f"duplicate parse for question id {parse.question_id!r}")
        by_id_parses[parse.question_id] = parse
    missing_parses = sorted(set(by_id_items) - set(by_id_parses))
    if missing_parses:
        raise DatasetError(f"questions without parses: {missing_parses}")
    missing_items = sorted(set(by_id_parses) - set(by_id_items))
    if missing_items:
        raise DatasetError(f"parses without questions: {missing_items}")
    return {qid: (by_id_items[qid], by_id_parses[qid]) for qid in sorted(by_id_items)}
