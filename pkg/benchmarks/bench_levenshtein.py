#!/usr/bin/env python3
"""Benchmark the Levenshtein kernels: compiled extension vs pure Python.

The inputs mimic what target selection actually compares: a code region plus
15 lines of context on each side, against a slightly edited copy. Run with:

    python3 benchmarks/bench_levenshtein.py
"""

import random
import time

from codemapper import similarity
from codemapper.similarity import _levenshtein_py


def context_pair(rng, lines, width, edits):
    """A context-sized string and an edited variant of it."""
    rows = [
        "".join(rng.choice("abcdefghijklmnop qrstuv_wxyz().=,") for _ in range(width))
        for _ in range(lines)
    ]
    text = "\n".join(rows)
    edited = list(text)
    for _ in range(edits):
        pos = rng.randrange(len(edited))
        edited[pos] = rng.choice("abcdefghijklmnopqrstuvwxyz")
    return text, "".join(edited)


def bench(kernel, pairs, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        for a, b in pairs:
            kernel(a, b)
        best = min(best, time.perf_counter() - started)
    return best


def main():
    rng = random.Random(1234)
    scenarios = [
        ("single line (40 chars)", 1, 40, 4),
        ("region + 2x5 context", 11, 38, 6),
        ("region + 2x15 context", 31, 38, 8),
        ("large block (80 lines)", 80, 38, 10),
    ]
    kernels = [("pure-python", _levenshtein_py)]
    try:
        from codemapper._speedups import levenshtein_kernel

        kernels.append(("compiled", levenshtein_kernel))
    except ImportError:
        print("compiled extension not built; benchmarking the fallback only")

    print(f"active backend at import: {similarity.BACKEND}\n")
    header = f"{'scenario':<26s}" + "".join(f"{name:>14s}" for name, _ in kernels)
    if len(kernels) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, lines, width, edits in scenarios:
        pairs = [context_pair(rng, lines, width, edits) for _ in range(8)]
        row = f"{label:<26s}"
        times = []
        for _, kernel in kernels:
            elapsed = bench(kernel, pairs)
            times.append(elapsed)
            row += f"{elapsed * 1000 / len(pairs):>11.2f} ms"
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
