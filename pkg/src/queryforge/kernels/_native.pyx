# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: trigram-set Dice similarity and token-window matching.

Must stay behaviorally identical to ``_pure``; the parity test suite compares
both backends on randomized inputs.
"""

BACKEND = "native"


def intersect_size(const int[::1] a, const int[::1] b):
    """Multiset intersection size of two sorted int arrays."""
    cdef Py_ssize_t i = 0, j = 0, hits = 0
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    cdef int x, y
    while i < na and j < nb:
        x = a[i]
        y = b[j]
        if x == y:
            hits += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return hits


def dice_sorted(const int[::1] a, const int[::1] b):
    """Dice coefficient of two sorted trigram-code multisets."""
    cdef Py_ssize_t total = a.shape[0] + b.shape[0]
    if total == 0:
        return 0.0
    return 2.0 * <double>intersect_size(a, b) / <double>total


def contains_window(const int[::1] haystack, const int[::1] pattern):
    """True if ``pattern`` (-1 = single-token wildcard) matches a window."""
    cdef Py_ssize_t m = pattern.shape[0], n = haystack.shape[0]
    cdef Py_ssize_t start, k
    cdef int p
    cdef bint ok
    if m == 0 or m > n:
        return False
    for start in range(n - m + 1):
        ok = True
        for k in range(m):
            p = pattern[k]
            if p != -1 and haystack[start + k] != p:
                ok = False
                break
        if ok:
            return True
    return False
