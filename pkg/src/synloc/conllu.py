"""Reading, validating, and writing dependency parses in CoNLL-U format.

One document (``# newdoc id = <question_id>``) holds the parse of one
question; sentences are separated by blank lines. Token lines carry the
usual 10 tab-separated columns; only ID, FORM, LEMMA, UPOS, HEAD and
DEPREL are retained. Multiword-token ranges (``3-4``) and empty nodes
(``3.1``) are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

N_COLUMNS = 10

_TOKEN_ID = re.compile(r"^\d+$")
_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_ID = re.compile(r"^\d+\.\d+$")


class ParseError(ValueError):
    """Malformed CoNLL-U input; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ValidationError(ValueError):
    """A structurally invalid sentence; names the question and sentence."""

    def __init__(self, question_id: str, sentence_index: int, message: str):
        super().__init__(
            f"question {question_id!r}, sentence {sentence_index + 1}: {message}"
        )
        self.question_id = question_id
        self.sentence_index = sentence_index


@dataclass(frozen=True)
class Token:
    """One syntactic token; ``head`` is 0 for the sentence root."""

    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def arcs(self) -> list[tuple[int, int]]:
        """All (dependent, head) pairs, excluding the root's virtual arc."""
        return [(t.index, t.head) for t in self.tokens if t.head != 0]

    @property
    def root_index(self) -> int:
        for t in self.tokens:
            if t.head == 0:
                return t.index
        raise ValueError("sentence has no root token")


@dataclass(frozen=True)
class QuestionParse:
    question_id: str
    sentences: tuple[Sentence, ...]
    raw_text: str

    def __post_init__(self):
        if not self.sentences:
            raise ValueError(f"question {self.question_id!r} has no sentences")
        if self.n_tokens == 0:
            raise ValueError(f"question {self.question_id!r} has no tokens")

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


def validate_sentence(tokens: list[Token], question_id: str, sentence_index: int) -> Sentence:
    """Check the tree invariants and return an immutable Sentence.

    Indices must be exactly 1..n, heads in range and never self-referent,
    exactly one root, and the head chains acyclic.
    """
    if not tokens:
        raise ValidationError(question_id, sentence_index, "empty sentence")
    n = len(tokens)
    for pos, tok in enumerate(tokens, start=1):
        if tok.index != pos:
            raise ValidationError(
                question_id, sentence_index,
                f"token indices must be 1..{n} with no gaps; saw id {tok.index} at position {pos}",
            )
    for tok in tokens:
        if tok.head == tok.index:
            raise ValidationError(
                question_id, sentence_index, f"token {tok.index} is its own head"
            )
        if not 0 <= tok.head <= n:
            raise ValidationError(
                question_id, sentence_index,
                f"token {tok.index} has head {tok.head} outside 0..{n}",
            )
    roots = [t.index for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise ValidationError(
            question_id, sentence_index,
            f"expected exactly one root token, found {len(roots)}",
        )
    heads = {t.index: t.head for t in tokens}
    for start in heads:
        seen = 0
        node = start
        while heads[node] != 0:
            node = heads[node]
            seen += 1
            if seen > n:
                raise ValidationError(
                    question_id, sentence_index,
                    f"cyclic head chain starting at token {start}",
                )
    return Sentence(tokens=tuple(tokens))


def _parse_token_line(line: str, line_number: int) -> Token | None:
    cols = line.split("\t")
    if len(cols) != N_COLUMNS:
        raise ParseError(
            line_number, f"expected {N_COLUMNS} tab-separated columns, got {len(cols)}"
        )
    tok_id = cols[0]
    if _RANGE_ID.match(tok_id) or _EMPTY_ID.match(tok_id):
        return None
    if not _TOKEN_ID.match(tok_id):
        raise ParseError(line_number, f"unrecognized token id {tok_id!r}")
    try:
        head = int(cols[6])
    except ValueError:
        raise ParseError(line_number, f"HEAD column is not an integer: {cols[6]!r}") from None
    if head < 0:
        raise ParseError(line_number, f"negative HEAD {head}")
    return Token(
        index=int(tok_id),
        form=cols[1],
        lemma=cols[2],
        upos=cols[3],
        head=head,
        deprel=cols[7],
    )


class _DocBuilder:
    def __init__(self, question_id: str):
        self.question_id = question_id
        self.doc_text: str | None = None
        self.sentence_texts: list[str] = []
        self.sentences: list[Sentence] = []
        self.pending: list[Token] = []
        self.in_sentence_block = False  # a sent_id or token line was seen

    def flush_sentence(self):
        if self.pending:
            self.sentences.append(
                validate_sentence(self.pending, self.question_id, len(self.sentences))
            )
            self.pending = []
        self.in_sentence_block = False

    def finish(self) -> QuestionParse:
        self.flush_sentence()
        if not self.sentences:
            raise ValidationError(self.question_id, 0, "document contains no sentences")
        if self.doc_text is not None:
            raw = self.doc_text
        elif self.sentence_texts:
            raw = " ".join(self.sentence_texts)
        else:
            raw = " ".join(
                " ".join(t.form for t in sent.tokens) for sent in self.sentences
            )
        return QuestionParse(
            question_id=self.question_id,
            sentences=tuple(self.sentences),
            raw_text=raw,
        )


def parse_conllu(text: str) -> list[QuestionParse]:
    """Parse CoNLL-U text into one QuestionParse per ``# newdoc`` block."""
    docs: list[QuestionParse] = []
    builder: _DocBuilder | None = None

    for line_number, raw_line in enumerate(text.split("\n"), start=1):
        line = raw_line.rstrip("\r")
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("newdoc"):
                _, _, doc_id = body.partition("=")
                doc_id = doc_id.strip()
                if not body.startswith("newdoc id") or not doc_id:
                    raise ParseError(line_number, "newdoc comment without an id")
                if builder is not None:
                    docs.append(builder.finish())
                builder = _DocBuilder(doc_id)
            elif body.startswith("sent_id") and builder is not None:
                builder.flush_sentence()
                builder.in_sentence_block = True
            elif body.startswith("text") and builder is not None:
                _, _, value = body.partition("=")
                value = value.strip()
                if not builder.in_sentence_block and builder.doc_text is None and not builder.sentences:
                    builder.doc_text = value
                else:
                    builder.sentence_texts.append(value)
            continue
        if not line.strip():
            if builder is not None:
                builder.flush_sentence()
            continue
        if builder is None:
            raise ParseError(line_number, "token line before any '# newdoc id' comment")
        token = _parse_token_line(line, line_number)
        if token is not None:
            builder.in_sentence_block = True
            builder.pending.append(token)

    if builder is not None:
        docs.append(builder.finish())
    return docs


def parse_conllu_file(path) -> list[QuestionParse]:
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh.read())


def serialize(questions: list[QuestionParse] | tuple[QuestionParse, ...]) -> str:
    """Write questions back to CoNLL-U; inverse of :func:`parse_conllu`."""
    out: list[str] = []
    for q in questions:
        out.append(f"# newdoc id = {q.question_id}")
        out.append(f"# text = {q.raw_text}")
        for si, sent in enumerate(q.sentences, start=1):
            out.append(f"# sent_id = {q.question_id}-s{si}")
            for t in sent.tokens:
                out.append(
                    "\t".join(
                        (
                            str(t.index), t.form, t.lemma, t.upos, "_", "_",
                            str(t.head), t.deprel, "_", "_",
                        )
                    )
                )
            out.append("")
    return "\n".join(out)


def write_conllu(questions, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(questions))
