"""Pure-Python reference implementation of the hot kernels.

Semantically identical to the compiled ``_native`` extension; used as the
fallback when the extension is unavailable (or when QUERYFORGE_PURE is set).
"""

from __future__ import annotations

BACKEND = "pure"


def intersect_size(a, b) -> int:
    """Multiset intersection size of two sorted int sequences."""
    i = j = hits = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            hits += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return hits


def dice_sorted(a, b) -> float:
    """Dice coefficient of two sorted trigram-code multisets."""
    total = len(a) + len(b)
    if total == 0:
        return 0.0
    return 2.0 * intersect_size(a, b) / total


def contains_window(haystack, pattern) -> bool:
    """True if ``pattern`` matches a contiguous window of ``haystack``.

    Both are int sequences; -1 in the pattern is a single-token wildcard.
    """
    m = len(pattern)
    n = len(haystack)
    if m == 0 or m > n:
        return False
    for start in range(n - m + 1):
        for k in range(m):
            p = pattern[k]
            if p != -1 and haystack[start + k] != p:
                break
        else:
            return True
    return False
