# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled edit-distance kernel over integer-coded sequences.

Mirrors _levenshtein_py.levenshtein_ints exactly; the two implementations
are cross-checked in the test suite and compared in benchmarks/.
"""

from libc.stdlib cimport free, malloc


def levenshtein_ints(a, b):
    """Two-row Levenshtein DP; accepts any int buffer (array('i'), memoryview)."""
    cdef int[:] va = a
    cdef int[:] vb = b
    cdef Py_ssize_t n = va.shape[0]
    cdef Py_ssize_t m = vb.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    if n > m:
        va, vb = vb, va
        n, m = m, n

    cdef int *prev = <int *> malloc((n + 1) * sizeof(int))
    cdef int *curr = <int *> malloc((n + 1) * sizeof(int))
    if prev == NULL or curr == NULL:
        free(prev)
        free(curr)
        raise MemoryError()

    cdef Py_ssize_t i, j
    cdef int add, delete, change, bi
    cdef int *tmp
    try:
        for j in range(n + 1):
            prev[j] = <int> j
        for i in range(1, m + 1):
            curr[0] = <int> i
            bi = vb[i - 1]
            for j in range(1, n + 1):
                add = prev[j] + 1
                delete = curr[j - 1] + 1
                change = prev[j - 1]
                if va[j - 1] != bi:
                    change += 1
                if delete < add:
                    add = delete
                if change < add:
                    add = change
                curr[j] = add
            tmp = prev
            prev = curr
            curr = tmp
        return prev[n]
    finally:
        free(prev)
        free(curr)
