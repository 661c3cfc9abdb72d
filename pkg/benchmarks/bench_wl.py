"""Benchmark: compiled vs pure-Python graph-kernel core.

Times pairwise kernel evaluations over random dependency-tree-shaped
graphs, which is the hot loop when every incorrect question is scanned
against the whole pool of correct ones.

Usage: python benchmarks/bench_wl.py [n_pairs] [nodes] [iterations]
"""

import random
import statistics
import sys
import time

from synloc import _wl_py
from synloc.treesim import LabeledGraph, _encode

try:
    from synloc import _wl_cy
except ImportError:
    _wl_cy = None

DEPRELS = ("nsubj", "obj", "obl", "nmod", "amod", "det", "case", "advmod",
           "nummod", "punct", "root", "dep", "DOC")


def random_tree_graph(rng, n):
    edges = []
    for v in range(1, n):
        edges.append((rng.randrange(v), v))
    labels = tuple(rng.choice(DEPRELS) for _ in range(n))
    return LabeledGraph(node_labels=labels, edges=tuple(edges))


def bench(core, encoded_pairs, iterations, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        acc = 0.0
        for e1, e2 in encoded_pairs:
            acc += core(*e1, *e2, iterations)
        best = min(best, time.perf_counter() - start)
    return best, acc


def main():
    n_pairs = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    nodes = int(sys.argv[2]) if len(sys.argv) > 2 else 45
    iterations = int(sys.argv[3]) if len(sys.argv) > 3 else 3

    rng = random.Random(12345)
    graphs = [random_tree_graph(rng, max(2, int(rng.gauss(nodes, nodes / 4))))
              for _ in range(200)]
    pairs = [(rng.choice(graphs), rng.choice(graphs)) for _ in range(n_pairs)]
    encoded = [(_encode(g1), _encode(g2)) for g1, g2 in pairs]
    sizes = [g.n_nodes for g in graphs]
    print(f"{n_pairs} kernel pairs, node counts ~N({nodes}, {nodes // 4}) "
          f"(median {statistics.median(sizes):.0f}), {iterations} refinement iterations")

    t_py, acc_py = bench(_wl_py.wl_kernel_core, encoded, iterations)
    print(f"python lane: {t_py:8.3f}s  ({1e6 * t_py / n_pairs:7.1f} us/pair)")

    if _wl_cy is None:
        print("cython lane: extension not built")
        return
    t_cy, acc_cy = bench(_wl_cy.wl_kernel_core, encoded, iterations)
    print(f"cython lane: {t_cy:8.3f}s  ({1e6 * t_cy / n_pairs:7.1f} us/pair)")
    assert acc_py == acc_cy, "lanes disagree"
    print(f"speedup: {t_py / t_cy:.1f}x (identical kernel sums: {acc_py:.0f})")


if __name__ == "__main__":
    main()
