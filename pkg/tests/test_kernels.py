"""Compiled and pure backends must agree bit for bit."""

import random

import numpy as np
import pytest

import tacticforge.kernels as kernels
from tacticforge.kernels import pure

compiled = pytest.importorskip(
    "tacticforge._ckernels", reason="compiled extension not built"
)

METRICS = [
    pure.COSINE,
    pure.EUCLID_SIM,
    pure.JACCARD,
    pure.WEIGHTED_JACCARD,
]


def rand_arr(rng, vocab=400, lo=1, hi=50):
    n = rng.randrange(lo, hi)
    return np.array(sorted(rng.sample(range(vocab), n)), dtype=np.int64)


def test_metric_codes_match():
    for name in ("COSINE", "EUCLID_SIM", "JACCARD", "WEIGHTED_JACCARD"):
        assert getattr(pure, name) == getattr(compiled, name)


def test_minhash_signatures_identical():
    rng = random.Random(0)
    seeds = np.array([rng.getrandbits(64) for _ in range(64)], dtype=np.uint64)
    for _ in range(100):
        f = rand_arr(rng, vocab=10**6)
        a = pure.minhash_signature(f, seeds)
        b = compiled.minhash_signature(f, seeds)
        assert np.array_equal(a, b)


@pytest.mark.parametrize("metric", METRICS)
def test_score_batch_identical(metric):
    rng = random.Random(metric)
    weights = np.array(
        [rng.uniform(0.1, 5.0) for _ in range(400)], dtype=np.float64
    )
    for _ in range(50):
        q = rand_arr(rng)
        entries = [rand_arr(rng) for _ in range(20)]
        a = pure.score_batch(q, entries, metric, weights)
        b = compiled.score_batch(q, entries, metric, weights)
        # bitwise, not approximate: same accumulation order by design
        assert np.array_equal(a, b)


def test_selected_backend_matches_forced_pure():
    rng = random.Random(9)
    q = rand_arr(rng)
    entries = [rand_arr(rng) for _ in range(10)]
    got = kernels.score_batch(q, entries, kernels.JACCARD)
    want = pure.score_batch(q, entries, pure.JACCARD)
    assert np.array_equal(got, want)


def test_identical_sets_score_one():
    arr = np.array([3, 7, 11], dtype=np.int64)
    for metric in (pure.COSINE, pure.JACCARD, pure.EUCLID_SIM):
        assert compiled.score_batch(arr, [arr.copy()], metric)[0] == 1.0
