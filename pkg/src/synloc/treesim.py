"""Structural similarity between question parses.

Questions become undirected labeled graphs (one node per token, labeled
with its dependency relation; a synthetic ``DOC`` node ties the sentence
roots together) and are compared with an iterative label-refinement
subtree kernel: at each level every node's label is replaced by an
interned encoding of (own label, sorted neighbor labels) and the dot
product of the two graphs' label histograms is accumulated.
"""

from __future__ import annotations

import json
import math
import threading
from array import array
from dataclasses import dataclass
from functools import lru_cache

from . import _native
from .conllu import QuestionParse

DOC_LABEL = "DOC"
DEFAULT_ITERATIONS = 3


class MatchPoolEmptyError(ValueError):
    """No correctly answered question is available to match against."""


@dataclass(frozen=True)
class LabeledGraph:
    """Undirected graph with string node labels; must be connected."""

    node_labels: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "node_labels", tuple(self.node_labels))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        n = len(self.node_labels)
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) outside node range 0..{n - 1}")
            if a == b:
                raise ValueError(f"self-loop edge at node {a}")
        if n > 1 and not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self) -> bool:
        n = len(self.node_labels)
        adj: list[list[int]] = [[] for _ in range(n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = [False] * n
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return all(seen)

    @property
    def n_nodes(self) -> int:
        return len(self.node_labels)


@dataclass(frozen=True)
class MatchResult:
    incorrect_id: str
    match_id: str
    similarity: float

    def __post_init__(self):
        if not 0.0 <= self.similarity <= 1.0:
            raise ValueError(f"similarity {self.similarity} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "incorrect_id": self.incorrect_id,
            "match_id": self.match_id,
            "similarity": self.similarity,
        }


@lru_cache(maxsize=65536)
def to_graph(question: QuestionParse) -> LabeledGraph:
    """One node per token labeled with its deprel, one edge per arc,
    plus a DOC node joined to every sentence root."""
    labels: list[str] = [DOC_LABEL]
    edges: list[tuple[int, int]] = []
    offset = 1
    for sent in question.sentences:
        for tok in sent.tokens:
            labels.append(tok.deprel)
            if tok.head == 0:
                edges.append((0, offset + tok.index - 1))
            else:
                edges.append((offset + tok.index - 1, offset + tok.head - 1))
        offset += len(sent)
    return LabeledGraph(node_labels=tuple(labels), edges=tuple(edges))


# shared label vocabulary; only code equality matters, so growth across
# unrelated graphs never changes kernel values
_VOCAB: dict[str, int] = {}
_VOCAB_LOCK = threading.Lock()


def _intern(label: str) -> int:
    code = _VOCAB.get(label)
    if code is None:
        with _VOCAB_LOCK:
            code = _VOCAB.setdefault(label, len(_VOCAB))
    return code


@lru_cache(maxsize=65536)
def _encode(graph: LabeledGraph):
    """Int labels plus CSR adjacency (each undirected edge in both rows)."""
    n = graph.n_nodes
    labels = array("q", (_intern(lbl) for lbl in graph.node_labels))
    degree = [0] * n
    for a, b in graph.edges:
        degree[a] += 1
        degree[b] += 1
    indptr = array("q", [0] * (n + 1))
    for v in range(n):
        indptr[v + 1] = indptr[v] + degree[v]
    cursor = list(indptr[:n])
    indices = array("q", [0] * (2 * len(graph.edges)))
    for a, b in graph.edges:
        indices[cursor[a]] = b
        cursor[a] += 1
        indices[cursor[b]] = a
        cursor[b] += 1
    return labels, indptr, indices


def wl_kernel(g1: LabeledGraph, g2: LabeledGraph, iterations: int = DEFAULT_ITERATIONS) -> float:
    """Unnormalized subtree-kernel value; symmetric and non-negative."""
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    l1, ip1, ix1 = _encode(g1)
    l2, ip2, ix2 = _encode(g2)
    return _native.wl_kernel_core(l1, ip1, ix1, l2, ip2, ix2, iterations)


@lru_cache(maxsize=65536)
def _self_kernel(graph: LabeledGraph, iterations: int) -> float:
    return wl_kernel(graph, graph, iterations)


def wl_similarity(g1: LabeledGraph, g2: LabeledGraph, iterations: int = DEFAULT_ITERATIONS) -> float:
    """Cosine-normalized kernel value in [0, 1]; 1.0 for identical graphs."""
    if g1.n_nodes == 0 or g2.n_nodes == 0:
        raise ValueError("similarity requires non-empty graphs")
    k11 = _self_kernel(g1, iterations)
    k22 = _self_kernel(g2, iterations)
    if k11 <= 0.0 or k22 <= 0.0:
        raise ValueError("self-kernel of a non-empty graph must be positive")
    sim = wl_kernel(g1, g2, iterations) / math.sqrt(k11 * k22)
    return min(1.0, max(0.0, sim))


def find_match(
    incorrect: QuestionParse,
    correct_pool: list[QuestionParse] | tuple[QuestionParse, ...],
    iterations: int = DEFAULT_ITERATIONS,
) -> MatchResult:
    """The pool element most similar to ``incorrect``.

    Ties break toward the lexicographically smallest question_id, so
    repeated calls are deterministic.
    """
    if not correct_pool:
        raise MatchPoolEmptyError(
            f"no candidates to match against question {incorrect.question_id!r}"
        )
    g_inc = to_graph(incorrect)
    best_id: str | None = None
    best_sim = -1.0
    for candidate in sorted(correct_pool, key=lambda q: q.question_id):
        sim = wl_similarity(g_inc, to_graph(candidate), iterations)
        if sim > best_sim:
            best_sim = sim
            best_id = candidate.question_id
    assert best_id is not None
    return MatchResult(
        incorrect_id=incorrect.question_id, match_id=best_id, similarity=best_sim
    )


def write_matches_jsonl(matches, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in matches:
            fh.write(json.dumps(m.to_dict(), sort_keys=True))
            fh.write("\n")
