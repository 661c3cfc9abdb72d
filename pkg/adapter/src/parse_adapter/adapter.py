"""Corpus conversion: question JSONL in, CoNLL-U out.

Every input question becomes one ``# newdoc id = <question_id>`` block;
sentence segmentation, tagging, and head assignment come from the
configured backend. The emitted dialect is exactly the 10-column format
the downstream scorer consumes, with ``_`` for unused fields.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .backends import load_backend

log = logging.getLogger(__name__)

DEFAULT_MODEL = "builtin"


class InputError(ValueError):
    pass


@dataclass
class AdapterConfig:
    input_path: str
    output_path: str
    parser_model_name: str = DEFAULT_MODEL

    def __post_init__(self):
        if not Path(self.input_path).exists():
            raise FileNotFoundError(f"input does not exist: {self.input_path}")
        parent = Path(self.output_path).resolve().parent
        parent.mkdir(parents=True, exist_ok=True)


def _load_questions(path) -> list[tuple[str, str]]:
    questions = []
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"line {line_number}: invalid JSON ({exc.msg})") from None
            if "id" not in obj or "question" not in obj:
                raise InputError(f"line {line_number}: need 'id' and 'question' fields")
            questions.append((str(obj["id"]), str(obj["question"])))
    return questions


def _oneline(text: str) -> str:
    return " ".join(text.split())


def render_document(question_id: str, text: str, sentences) -> str:
    lines = [f"# newdoc id = {question_id}", f"# text = {_oneline(text)}"]
    for si, rows in enumerate(sentences, start=1):
        lines.append(f"# sent_id = {question_id}-s{si}")
        lines.append(f"# text = {_oneline(' '.join(r[0] for r in rows))}")
        for i, (form, lemma, upos, head, deprel) in enumerate(rows, start=1):
            lines.append("\t".join(
                (str(i), form, lemma, upos, "_", "_", str(head), deprel, "_", "_")
            ))
        lines.append("")
    return "\n".join(lines)


def parse_corpus(config: AdapterConfig) -> dict:
    """Convert the whole input file; returns counts for reporting.

    Questions that tokenize to nothing are skipped with a logged warning;
    their ids are returned under ``skipped``.
    """
    backend = load_backend(config.parser_model_name)
    questions = _load_questions(config.input_path)
    blocks: list[str] = []
    skipped: list[str] = []
    for question_id, text in questions:
        sentences = backend.parse(text)
        if not sentences:
            log.warning("question %s yielded zero tokens; skipped", question_id)
            skipped.append(question_id)
            continue
        blocks.append(render_document(question_id, text, sentences))
    with open(config.output_path, "w", encoding="utf-8") as fh:
        if blocks:
            fh.write(f"# parser = {backend.name}\n")
            fh.write("\n".join(blocks))
            fh.write("\n")
    return {
        "parser": backend.name,
        "questions": len(questions),
        "written": len(blocks),
        "skipped": skipped,
    }
