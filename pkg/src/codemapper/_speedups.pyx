# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled inner loop for the Levenshtein edit distance."""

from libc.stdlib cimport free, malloc


def levenshtein_kernel(str a, str b):
    """Edit distance between two unicode strings (insert/delete/substitute)."""
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la

    cdef Py_ssize_t *row = <Py_ssize_t *> malloc((lb + 1) * sizeof(Py_ssize_t))
    if row == NULL:
        raise MemoryError()

    cdef Py_ssize_t i, j, cur, left, above, diag
    cdef Py_UCS4 ca
    try:
        for j in range(lb + 1):
            row[j] = j
        for i in range(1, la + 1):
            ca = a[i - 1]
            diag = row[0]
            row[0] = i
            for j in range(1, lb + 1):
                above = row[j]
                cur = diag if ca == b[j - 1] else diag + 1
                left = row[j - 1] + 1
                if left < cur:
                    cur = left
                if above + 1 < cur:
                    cur = above + 1
                diag = above
                row[j] = cur
        return row[lb]
    finally:
        free(row)
