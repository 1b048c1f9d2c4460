"""Pure-Python fallback for the edit-distance kernel."""

from __future__ import annotations


def levenshtein_ints(a, b) -> int:
    """Two-row Levenshtein DP over integer-coded sequences."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    if n > m:
        a, b = b, a
        n, m = m, n

    current = list(range(n + 1))
    for i in range(1, m + 1):
        previous, current = current, [i] + [0] * n
        bi = b[i - 1]
        for j in range(1, n + 1):
            add = previous[j] + 1
            delete = current[j - 1] + 1
            change = previous[j - 1]
            if a[j - 1] != bi:
                change += 1
            current[j] = min(add, delete, change)
    return current[n]
