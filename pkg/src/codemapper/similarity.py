"""Levenshtein distance and similarity.

The distance kernel exists twice: a compiled Cython extension for the hot
inner loop and a pure-Python fallback. The backend is picked once at import;
set CODEMAPPER_PURE_PYTHON=1 to force the fallback.
"""

import os


def _levenshtein_py(a: str, b: str) -> int:
    """Two-row dynamic-programming edit distance; the fallback kernel."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        append = cur.append
        prev_j = prev[0]
        for j, cb in enumerate(b, 1):
            cost = prev_j if ca == cb else prev_j + 1
            prev_j = prev[j]
            down = prev_j + 1
            if down < cost:
                cost = down
            right = cur[j - 1] + 1
            if right < cost:
                cost = right
            append(cost)
        prev = cur
    return prev[-1]


if os.environ.get("CODEMAPPER_PURE_PYTHON"):
    _kernel = _levenshtein_py
    BACKEND = "python"
else:
    try:
        from codemapper._speedups import levenshtein_kernel as _kernel

        BACKEND = "c"
    except ImportError:
        _kernel = _levenshtein_py
        BACKEND = "python"


def levenshtein_distance(a: str, b: str) -> int:
    if a == b:
        return 0
    # Stripping a common prefix/suffix preserves the distance and skips the
    # bulk of the DP table on context-heavy inputs.
    lo = 0
    hi_a, hi_b = len(a), len(b)
    lo_max = min(hi_a, hi_b)
    while lo < lo_max and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    return _kernel(a[lo:hi_a], b[lo:hi_b])


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance / max(len); two empty strings are fully similar."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / max(len(a), len(b))
