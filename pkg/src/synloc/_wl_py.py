"""Pure-Python core for the pairwise label-refinement graph kernel.

Fallback lane; the compiled extension in ``_wl_cy`` implements the same
contract and must return bit-identical values (all arithmetic is exact
integer counting).
"""

from __future__ import annotations


def _refine(codes, indptr, indices, table):
    new = [0] * len(codes)
    for v in range(len(codes)):
        neigh = sorted(codes[indices[e]] for e in range(indptr[v], indptr[v + 1]))
        key = (codes[v], *neigh)
        code = table.get(key)
        if code is None:
            code = len(table)
            table[key] = code
        new[v] = code
    return new


def _hist_dot(codes1, codes2, n_codes):
    h1 = [0] * n_codes
    h2 = [0] * n_codes
    for c in codes1:
        h1[c] += 1
    for c in codes2:
        h2[c] += 1
    return sum(a * b for a, b in zip(h1, h2))


def wl_kernel_core(labels1, indptr1, indices1, labels2, indptr2, indices2, iterations):
    """Accumulated histogram dot products over refinement levels 0..iterations.

    Labels are int codes drawn from a vocabulary shared by both graphs;
    adjacency is in CSR form (undirected arcs listed in both directions).
    """
    cur1 = list(labels1)
    cur2 = list(labels2)
    if not cur1 and not cur2:
        return 0.0
    n_codes = max(max(cur1, default=-1), max(cur2, default=-1)) + 1
    total = _hist_dot(cur1, cur2, n_codes)
    for _ in range(iterations):
        table: dict = {}
        cur1 = _refine(cur1, indptr1, indices1, table)
        cur2 = _refine(cur2, indptr2, indices2, table)
        total += _hist_dot(cur1, cur2, len(table))
    return float(total)
