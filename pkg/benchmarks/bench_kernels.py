"""Benchmark the compiled scoring/MinHash kernels against the pure
NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--entries N] [--repeat R]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from tacticforge.kernels import pure

try:
    from tacticforge import _ckernels as compiled
except ImportError:
    compiled = None

METRICS = [
    ("cosine", pure.COSINE),
    ("euclid", pure.EUCLID_SIM),
    ("jaccard", pure.JACCARD),
    ("tfidf-jaccard", pure.WEIGHTED_JACCARD),
]


def rand_arr(rng, vocab, lo, hi):
    return np.array(
        sorted(rng.sample(range(vocab), rng.randrange(lo, hi))), dtype=np.int64
    )


def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--entries", type=int, default=20000)
    parser.add_argument("--vocab", type=int, default=5000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--depth", type=int, default=32)
    args = parser.parse_args()
    rng = random.Random(0)
    query = rand_arr(rng, args.vocab, 10, 60)
    entries = [rand_arr(rng, args.vocab, 5, 80) for _ in range(args.entries)]
    weights = np.abs(np.random.default_rng(0).normal(1.0, 0.5, args.vocab))
    seeds = np.array(
        [rng.getrandbits(64) for _ in range(args.depth)], dtype=np.uint64
    )

    backends = [("pure", pure)]
    if compiled is not None:
        backends.append(("compiled", compiled))
    else:
        print("compiled extension not available; benchmarking pure only")

    print(f"score_batch: {args.entries} entries, best of {args.repeat}")
    for metric_name, code in METRICS:
        row = [f"  {metric_name:<14}"]
        times = {}
        for name, mod in backends:
            t = bench(lambda m=mod: m.score_batch(query, entries, code, weights),
                      args.repeat)
            times[name] = t
            row.append(f"{name} {t * 1e3:8.2f} ms")
        if len(times) == 2:
            row.append(f"speedup {times['pure'] / times['compiled']:6.1f}x")
        print(" ".join(row))

    print(f"minhash_signature: {args.entries} sets, D={args.depth}, "
          f"best of {args.repeat}")
    row = ["  signature     "]
    times = {}
    for name, mod in backends:
        t = bench(
            lambda m=mod: [m.minhash_signature(e, seeds) for e in entries],
            args.repeat,
        )
        times[name] = t
        row.append(f"{name} {t * 1e3:8.2f} ms")
    if len(times) == 2:
        row.append(f"speedup {times['pure'] / times['compiled']:6.1f}x")
    print(" ".join(row))


if __name__ == "__main__":
    main()
