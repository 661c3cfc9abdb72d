"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from synloc.conllu import Sentence, Token, parse_conllu_file, validate_sentence
from synloc.treesim import LabeledGraph

FIXTURES = Path(__file__).parent / "fixtures"

UPOS_CHOICES = ("NOUN", "PROPN", "NUM", "VERB", "ADJ", "ADV", "ADP", "AUX", "DET", "PRON", "PUNCT")
DEPREL_CHOICES = ("nsubj", "obj", "obl", "nmod", "amod", "det", "case", "advmod", "dep")


@pytest.fixture(scope="session")
def melissa_parse():
    return parse_conllu_file(FIXTURES / "melissa.conllu")[0]


def make_sentence(specs) -> Sentence:
    """Build a validated sentence from (form, upos, head, deprel) tuples."""
    tokens = [
        Token(index=i, form=form, lemma=form.lower(), upos=upos, head=head, deprel=deprel)
        for i, (form, upos, head, deprel) in enumerate(specs, start=1)
    ]
    return validate_sentence(tokens, "test", 0)


def random_tree_sentence(rng: random.Random, n: int) -> Sentence:
    """Uniform-ish random dependency tree over n tokens."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = {order[0]: 0}
    for pos in range(1, n):
        heads[order[pos]] = order[rng.randrange(pos)]
    tokens = [
        Token(
            index=i,
            form=f"w{i}",
            lemma=f"w{i}",
            upos=rng.choice(UPOS_CHOICES),
            head=heads[i],
            deprel="root" if heads[i] == 0 else rng.choice(DEPREL_CHOICES),
        )
        for i in range(1, n + 1)
    ]
    return validate_sentence(tokens, "random", 0)


def storage_oracle(sentence: Sentence, i: int) -> int:
    """Independent storage count: materialize every arc, count crossings."""
    return sum(1 for d, h in sentence.arcs() if min(d, h) <= i < max(d, h))


def random_graph(rng: random.Random, n: int, extra_edges: int = 2,
                 alphabet=("a", "b", "c")) -> LabeledGraph:
    """Random connected labeled graph: spanning tree plus a few chords."""
    edges = set()
    for v in range(1, n):
        u = rng.randrange(v)
        edges.add((u, v))
    for _ in range(extra_edges):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    labels = tuple(rng.choice(alphabet) for _ in range(n))
    return LabeledGraph(node_labels=labels, edges=tuple(sorted(edges)))


def permuted_graph(rng: random.Random, graph: LabeledGraph) -> LabeledGraph:
    """Isomorphic copy under a random node permutation."""
    n = graph.n_nodes
    perm = list(range(n))
    rng.shuffle(perm)
    labels = [""] * n
    for old, lbl in enumerate(graph.node_labels):
        labels[perm[old]] = lbl
    edges = tuple(sorted((min(perm[a], perm[b]), max(perm[a], perm[b]))
                         for a, b in graph.edges))
    return LabeledGraph(node_labels=tuple(labels), edges=edges)


class RuleClient:
    """Duck-typed LLM client answering from a prompt -> completion rule."""

    def __init__(self, rule):
        self.rule = rule
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        return self.rule(prompt)


def question_from_qa_prompt(prompt: str) -> str:
    """Pull the bare question text back out of a QA prompt."""
    _, _, rest = prompt.partition("Question: ")
    text, _, _ = rest.rpartition("\nAnswer:")
    return text


def source_from_rephrase_prompt(prompt: str) -> str:
    """Pull the question-to-rewrite back out of a rewrite prompt."""
    _, _, rest = prompt.partition("SOURCE (problem to rewrite):\n")
    text, _, _ = rest.partition("\n\nRewritten problem:")
    return text


def mock_tables_for_recovery(items_by_id, parses_by_id, wrong_ids, recover_ids,
                             k_shots=3, iterations=3):
    """Fixture tables (sha256(prompt) -> completion) scripting a full
    baseline + recovery run through the table-backed mock client.

    Wrong questions answer gold+1 at baseline; their rephrasings append
    ' rephrased' to the original text and answer gold again only for ids
    in ``recover_ids``.
    """
    from synloc.llm import prompt_sha
    from synloc.pipeline import qa_prompt
    from synloc.rephrase import build_prompt, load_default_exemplars
    from synloc.treesim import find_match

    qa: dict[str, str] = {}
    rephrase: dict[str, str] = {}
    for qid, item in items_by_id.items():
        gold = item.gold_answer
        answer = gold if qid not in wrong_ids else gold + 1
        qa[prompt_sha(qa_prompt(item.question_text))] = f"#### {answer:g}"
    pool = [parses_by_id[qid] for qid in sorted(items_by_id) if qid not in wrong_ids]
    exemplars = load_default_exemplars()[:k_shots]
    for qid in sorted(wrong_ids):
        match = find_match(parses_by_id[qid], pool, iterations)
        prompt = build_prompt(
            items_by_id[qid].question_text,
            items_by_id[match.match_id].question_text,
            exemplars,
        )
        rephrased = items_by_id[qid].question_text + " rephrased"
        rephrase[prompt_sha(prompt)] = rephrased
        gold = items_by_id[qid].gold_answer
        answer = gold if qid in recover_ids else gold + 1
        qa[prompt_sha(qa_prompt(rephrased))] = f"#### {answer:g}"
    return qa, rephrase
