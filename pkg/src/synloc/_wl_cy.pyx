# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled core for the pairwise label-refinement graph kernel.

Same contract as ``_wl_py.wl_kernel_core``; refinement keys are packed
into fixed-width byte strings so hashing stays in C.
"""

from libc.stdlib cimport malloc, free
from cpython.bytes cimport PyBytes_FromStringAndSize


cdef void _isort(long long* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef long long key
    for i in range(1, n):
        key = a[i]
        j = i - 1
        while j >= 0 and a[j] > key:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = key


cdef long long _hist_dot(long long* c1, Py_ssize_t n1, long long* c2, Py_ssize_t n2,
                         long long* h1, long long* h2, Py_ssize_t n_codes) noexcept nogil:
    cdef Py_ssize_t i
    cdef long long dot = 0
    for i in range(n_codes):
        h1[i] = 0
        h2[i] = 0
    for i in range(n1):
        h1[c1[i]] += 1
    for i in range(n2):
        h2[c2[i]] += 1
    for i in range(n_codes):
        dot += h1[i] * h2[i]
    return dot


cdef Py_ssize_t _refine(long long* cur, long long* new, Py_ssize_t n,
                        const long long[:] indptr, const long long[:] indices,
                        long long* buf, dict table) except -1:
    cdef Py_ssize_t v, e, deg
    cdef object key, code
    for v in range(n):
        deg = indptr[v + 1] - indptr[v]
        buf[0] = cur[v]
        for e in range(deg):
            buf[1 + e] = cur[indices[indptr[v] + e]]
        _isort(buf + 1, deg)
        key = PyBytes_FromStringAndSize(<char*> buf, (deg + 1) * sizeof(long long))
        code = table.get(key)
        if code is None:
            code = len(table)
            table[key] = code
        new[v] = <long long> code
    return 0


def wl_kernel_core(const long long[:] labels1, const long long[:] indptr1, const long long[:] indices1,
                   const long long[:] labels2, const long long[:] indptr2, const long long[:] indices2,
                   int iterations):
    cdef Py_ssize_t n1 = labels1.shape[0]
    cdef Py_ssize_t n2 = labels2.shape[0]
    cdef Py_ssize_t ntot = n1 + n2
    if ntot == 0:
        return 0.0

    cdef Py_ssize_t v, it, max_deg = 0, d
    cdef long long n_codes = 0
    for v in range(n1):
        d = indptr1[v + 1] - indptr1[v]
        if d > max_deg:
            max_deg = d
        if labels1[v] + 1 > n_codes:
            n_codes = labels1[v] + 1
    for v in range(n2):
        d = indptr2[v + 1] - indptr2[v]
        if d > max_deg:
            max_deg = d
        if labels2[v] + 1 > n_codes:
            n_codes = labels2[v] + 1

    # level-0 codes come from the shared vocabulary, later levels are
    # freshly interned per level, so ntot slots always suffice after h=0
    cdef Py_ssize_t hist_size = n_codes if n_codes > ntot else ntot
    cdef long long* cur1 = <long long*> malloc((n1 + 1) * sizeof(long long))
    cdef long long* cur2 = <long long*> malloc((n2 + 1) * sizeof(long long))
    cdef long long* new1 = <long long*> malloc((n1 + 1) * sizeof(long long))
    cdef long long* new2 = <long long*> malloc((n2 + 1) * sizeof(long long))
    cdef long long* h1 = <long long*> malloc((hist_size + 1) * sizeof(long long))
    cdef long long* h2 = <long long*> malloc((hist_size + 1) * sizeof(long long))
    cdef long long* buf = <long long*> malloc((max_deg + 1) * sizeof(long long))
    if not (cur1 and cur2 and new1 and new2 and h1 and h2 and buf):
        free(cur1); free(cur2); free(new1); free(new2); free(h1); free(h2); free(buf)
        raise MemoryError()

    cdef long long total = 0
    cdef long long* tmp
    cdef dict table
    try:
        for v in range(n1):
            cur1[v] = labels1[v]
        for v in range(n2):
            cur2[v] = labels2[v]
        total += _hist_dot(cur1, n1, cur2, n2, h1, h2, n_codes)
        for it in range(iterations):
            table = {}
            _refine(cur1, new1, n1, indptr1, indices1, buf, table)
            _refine(cur2, new2, n2, indptr2, indices2, buf, table)
            tmp = cur1; cur1 = new1; new1 = tmp
            tmp = cur2; cur2 = new2; new2 = tmp
            total += _hist_dot(cur1, n1, cur2, n2, h1, h2, len(table))
        return float(total)
    finally:
        free(cur1); free(cur2); free(new1); free(new2); free(h1); free(h2); free(buf)
