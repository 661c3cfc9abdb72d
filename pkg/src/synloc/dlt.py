"""Locality-based syntactic complexity costs over dependency parses.

Three per-token costs are computed from each sentence's tree:

* integration — number of discourse referents strictly between a token
  and its head in linear order (0 for the root);
* storage — number of dependency arcs spanning the position, i.e. arcs
  opened at or before it whose other endpoint is still unread;
* discourse — 1 when the token itself introduces a referent.

A question's total score sums all three over all tokens. The normalized
score is ``integration_sum / discourse_sum + storage_peak / n_tokens +
discourse_sum``, which removes the length dependence of the raw total.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, asdict

from .conllu import QuestionParse, Sentence, Token

REFERENT_UPOS = frozenset({"NOUN", "PROPN", "NUM", "VERB"})


@dataclass(frozen=True)
class TokenCost:
    sentence_index: int
    token_index: int
    integration: int
    storage: int
    discourse: int


@dataclass(frozen=True)
class DltBreakdown:
    question_id: str
    per_token: tuple[TokenCost, ...]
    integration_sum: int
    storage_peak: int
    discourse_sum: int
    total: int
    normalized: float

    def __post_init__(self):
        storage_sum = sum(t.storage for t in self.per_token)
        if self.total != self.integration_sum + self.discourse_sum + storage_sum:
            raise ValueError("total must equal integration_sum + discourse_sum + storage")
        if self.storage_peak != max((t.storage for t in self.per_token), default=0):
            raise ValueError("storage_peak must be the maximum per-token storage")
        if self.normalized < 0:
            raise ValueError("normalized score must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_token"] = [asdict(t) for t in self.per_token]
        return d


def is_referent(token: Token) -> bool:
    """True when the token introduces a trackable discourse referent."""
    return token.upos in REFERENT_UPOS


def discourse_cost(token: Token) -> int:
    return 1 if is_referent(token) else 0


def integration_cost(sentence: Sentence, i: int) -> int:
    """Referents strictly between token ``i`` (1-based) and its head."""
    if not 1 <= i <= len(sentence):
        raise IndexError(f"token index {i} out of range 1..{len(sentence)}")
    head = sentence.tokens[i - 1].head
    if head == 0:
        return 0
    lo, hi = min(i, head), max(i, head)
    return sum(1 for j in range(lo + 1, hi) if is_referent(sentence.tokens[j - 1]))


def storage_costs(sentence: Sentence) -> list[int]:
    """Open-arc count at every position, via a difference array."""
    n = len(sentence)
    diff = [0] * (n + 2)
    for dep, head in sentence.arcs():
        lo, hi = min(dep, head), max(dep, head)
        # the arc is open at positions lo..hi-1
        diff[lo] += 1
        diff[hi] -= 1
    out = []
    running = 0
    for pos in range(1, n + 1):
        running += diff[pos]
        out.append(running)
    return out


def storage_cost(sentence: Sentence, i: int) -> int:
    if not 1 <= i <= len(sentence):
        raise IndexError(f"token index {i} out of range 1..{len(sentence)}")
    return storage_costs(sentence)[i - 1]


def normalized_score(integration_sum: int, discourse_sum: int,
                     storage_peak: int, n_tokens: int) -> float:
    """Length-independent aggregate; the integration ratio and discourse
    term drop out when the question introduces no referents."""
    if n_tokens <= 0:
        raise ValueError("n_tokens must be positive")
    if discourse_sum > 0:
        return integration_sum / discourse_sum + storage_peak / n_tokens + discourse_sum
    return storage_peak / n_tokens


def score(question: QuestionParse) -> DltBreakdown:
    """Score one question; arcs never cross sentence boundaries.

    When the question introduces no referents at all, the integration
    ratio and the discourse term drop out of the normalized score and a
    degenerate-input warning is emitted.
    """
    per_token: list[TokenCost] = []
    integration_sum = 0
    storage_sum = 0
    storage_peak = 0
    discourse_sum = 0
    for si, sent in enumerate(question.sentences):
        stor = storage_costs(sent)
        for tok in sent.tokens:
            integ = integration_cost(sent, tok.index)
            disc = discourse_cost(tok)
            s = stor[tok.index - 1]
            per_token.append(
                TokenCost(
                    sentence_index=si,
                    token_index=tok.index,
                    integration=integ,
                    storage=s,
                    discourse=disc,
                )
            )
            integration_sum += integ
            storage_sum += s
            storage_peak = max(storage_peak, s)
            discourse_sum += disc
    n = question.n_tokens
    total = integration_sum + storage_sum + discourse_sum
    if discourse_sum == 0:
        warnings.warn(
            f"question {question.question_id!r} has no discourse referents; "
            "normalized score reduces to storage_peak / n_tokens",
            stacklevel=2,
        )
    normalized = normalized_score(integration_sum, discourse_sum, storage_peak, n)
    return DltBreakdown(
        question_id=question.question_id,
        per_token=tuple(per_token),
        integration_sum=integration_sum,
        storage_peak=storage_peak,
        discourse_sum=discourse_sum,
        total=total,
        normalized=normalized,
    )


def write_breakdowns_jsonl(breakdowns, path) -> None:
    """One JSON record per question, in input order."""
    with open(path, "w", encoding="utf-8") as fh:
        for b in breakdowns:
            fh.write(json.dumps(b.to_dict(), sort_keys=True))
            fh.write("\n")


SUMMARY_FIELDS = (
    "question_id", "total", "normalized",
    "integration_sum", "discourse_sum", "storage_peak",
)


def write_summary_csv(breakdowns, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_FIELDS)
        for b in breakdowns:
            writer.writerow(
                [b.question_id, b.total, b.normalized,
                 b.integration_sum, b.discourse_sum, b.storage_peak]
            )
