#!/usr/bin/env python3
"""Benchmark the two Levenshtein kernels: numba @njit vs vectorized numpy.

Times realistic sentence-length pairs (the fluency scorer's workload) plus
a long-string case. Run:

    python benchmarks/bench_levenshtein.py
"""

from __future__ import annotations

import random
import time

from claimeval import kernels

WORDS = (
    "the a an of in on was were is are born won leads city river year "
    "stated famous capital president company album film north south "
    "university member american french record series national"
).split()


def sentence(rng: random.Random, n_words: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n_words)) + "."


def perturb(rng: random.Random, text: str) -> str:
    chars = list(text)
    for _ in range(max(1, len(chars) // 20)):
        pos = rng.randrange(len(chars))
        op = rng.random()
        if op < 0.4:
            chars[pos] = rng.choice("abcdefghij")
        elif op < 0.7:
            chars.insert(pos, rng.choice("klmnop"))
        elif len(chars) > 1:
            del chars[pos]
    return "".join(chars)


def bench(fn, pairs, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for a, b in pairs:
            fn(a, b)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    rng = random.Random(7)
    workloads = {
        "short sentences (12 words, n=2000)": [
            (s, perturb(rng, s)) for s in (sentence(rng, 12) for _ in range(2000))
        ],
        "long sentences (40 words, n=500)": [
            (s, perturb(rng, s)) for s in (sentence(rng, 40) for _ in range(500))
        ],
        "paragraphs (200 words, n=50)": [
            (s, perturb(rng, s)) for s in (sentence(rng, 200) for _ in range(50))
        ],
    }

    implementations = [("numpy", kernels.levenshtein_numpy)]
    if kernels._lev_jit is not None:
        implementations.insert(0, ("numba", kernels.levenshtein_numba))
        kernels.levenshtein_numba("warm", "up")  # trigger JIT compile
    else:
        print("numba kernel unavailable (disabled or not installed); numpy only\n")

    print(f"active dispatch: {kernels.active_implementation()}\n")
    header = f"{'workload':<38}" + "".join(f"{name:>12}" for name, _ in implementations)
    print(header)
    print("-" * len(header))
    for label, pairs in workloads.items():
        sample = pairs[:5]
        results = {name: [fn(a, b) for a, b in sample] for name, fn in implementations}
        first = next(iter(results.values()))
        assert all(r == first for r in results.values()), "kernels disagree"
        cells = "".join(
            f"{bench(fn, pairs) * 1000:>10.1f}ms" for _, fn in implementations
        )
        print(f"{label:<38}{cells}")


if __name__ == "__main__":
    main()
