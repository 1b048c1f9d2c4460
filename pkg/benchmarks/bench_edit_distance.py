#!/usr/bin/env python3
"""Benchmark the word-level edit-distance kernel: compiled vs pure Python.

Both backends are imported into one process and timed on identical random
integer-code sequences, so the comparison isolates the inner loop.  Run after
an editable install:

    python3 benchmarks/bench_edit_distance.py
    python3 benchmarks/bench_edit_distance.py --sizes 25,100,400 --pairs 40
"""

from __future__ import annotations

import argparse
import random
import time
from array import array

from tokenweave.kernels import _levenshtein_py
from tokenweave.metrics import format_table

try:
    from tokenweave.kernels import _levenshtein as _ext
except ImportError:
    _ext = None


def _random_pairs(rng: random.Random, size: int, pairs: int, vocab: int):
    out = []
    for _ in range(pairs):
        a = array("i", (rng.randrange(vocab) for _ in range(size)))
        b = array("i", (rng.randrange(vocab) for _ in range(size)))
        out.append((a, b))
    return out


def _time_backend(impl, pairs) -> tuple[float, list[int]]:
    results = []
    start = time.perf_counter()
    for a, b in pairs:
        results.append(impl(a, b))
    return time.perf_counter() - start, results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="10,50,100,200,400", help="comma-separated sequence lengths")
    parser.add_argument("--pairs", type=int, default=50, help="random pairs per length")
    parser.add_argument("--vocab", type=int, default=500, help="distinct word codes")
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rng = random.Random(args.seed)

    if _ext is None:
        print("compiled kernel not available; timing the pure-Python backend only\n")

    rows = []
    for size in sizes:
        pairs = _random_pairs(rng, size, args.pairs, args.vocab)
        py_total, py_results = _time_backend(_levenshtein_py.levenshtein_ints, pairs)
        row = [str(size), f"{1000 * py_total / len(pairs):.3f}"]
        if _ext is not None:
            cy_total, cy_results = _time_backend(_ext.levenshtein_ints, pairs)
            if cy_results != py_results:
                raise SystemExit(f"backend mismatch at size {size}: kernels disagree")
            row += [f"{1000 * cy_total / len(pairs):.3f}", f"{py_total / cy_total:.1f}x"]
        rows.append(row)

    headers = ["words/side", "python ms/pair"]
    if _ext is not None:
        headers += ["cython ms/pair", "speedup"]
    print(format_table(headers, rows))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
