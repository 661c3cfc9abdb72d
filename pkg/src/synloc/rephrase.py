"""Prompt construction for structure-guided rewriting, plus answer handling.

The prompt template is a versioned text asset so experiment runs can pin
the exact wording; default k-shot exemplars ship as a JSON asset.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

TEMPLATE_VERSION = "v1"

_MARKER = re.compile(r"####\s*([-+]?[0-9][0-9,]*(?:\.[0-9]+)?)")
_NUMBER = re.compile(r"[-+]?[0-9][0-9,]*(?:\.[0-9]+)?")


@dataclass(frozen=True)
class RephraseRecord:
    incorrect_id: str
    match_id: str
    prompt: str
    rephrased_text: str

    def __post_init__(self):
        if not self.rephrased_text:
            raise ValueError("rephrased_text must be non-empty")


def _asset_text(name: str) -> str:
    return resources.files(__package__).joinpath("assets", name).read_text("utf-8")


def load_prompt_template(version: str = TEMPLATE_VERSION) -> str:
    return _asset_text(f"rephrase_prompt_{version}.txt")


def load_default_exemplars(version: str = TEMPLATE_VERSION) -> list[tuple[str, str]]:
    pairs = json.loads(_asset_text(f"exemplars_{version}.json"))
    return [(p["before"], p["after"]) for p in pairs]


def build_prompt(incorrect: str, match: str, exemplars=()) -> str:
    """Deterministic rewrite prompt: instructions, k exemplars, then the
    target-structure question and the question to rewrite."""
    if not incorrect or not match:
        raise ValueError("both question texts must be non-empty")
    blocks = []
    for n, (before, after) in enumerate(exemplars, start=1):
        blocks.append(
            f"Example {n}:\nOriginal: {before}\nRewritten: {after}\n\n"
        )
    template = load_prompt_template()
    return (
        template
        .replace("<<EXEMPLARS>>", "".join(blocks))
        .replace("<<TARGET>>", match)
        .replace("<<SOURCE>>", incorrect)
    )


def extract_answer(completion: str) -> float | None:
    """Final numeric answer of a completion.

    A ``#### <number>`` marker wins; otherwise the last numeric literal
    (commas stripped) is taken. Returns None when no numeral occurs —
    never raises.
    """
    if not isinstance(completion, str):
        return None
    markers = _MARKER.findall(completion)
    if markers:
        return float(markers[-1].replace(",", ""))
    numbers = _NUMBER.findall(completion)
    if numbers:
        return float(numbers[-1].replace(",", ""))
    return None


def answers_equal(a: float, b: float) -> bool:
    """Exact for integer-valued pairs, relative 1e-4 tolerance otherwise."""
    a = float(a)
    b = float(b)
    if a.is_integer() and b.is_integer():
        return a == b
    return abs(a - b) <= 1e-4 * max(1.0, abs(b))
