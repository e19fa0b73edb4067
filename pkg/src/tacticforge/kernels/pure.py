"""Pure NumPy fallback for the scoring and MinHash kernels.

Bit-for-bit compatible with the compiled backend in ``_ckernels``: the
hash mixer is splitmix64's finalizer over wrapping uint64 arithmetic,
which NumPy reproduces exactly.
"""

from __future__ import annotations

import math

import numpy as np

COSINE = 0
EUCLID_SIM = 1
JACCARD = 2
WEIGHTED_JACCARD = 3

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z + _GAMMA).astype(np.uint64)
    z = ((z ^ (z >> np.uint64(30))) * _M1).astype(np.uint64)
    z = ((z ^ (z >> np.uint64(27))) * _M2).astype(np.uint64)
    return z ^ (z >> np.uint64(31))


def minhash_signature(features: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """values[i] = min over x in features of mix64(seeds[i] ^ x)."""
    f = features.astype(np.uint64)
    hashed = _mix64(seeds[np.newaxis, :] ^ f[:, np.newaxis])
    return hashed.min(axis=0)


def score_batch(
    query: np.ndarray,
    entries: list[np.ndarray],
    metric: int,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """Similarity of the query feature-id array against each entry array.

    Arrays are sorted int64 feature ids. Euclid is returned as the
    similarity 1/(1+d) so higher is uniformly better.
    """
    nq = len(query)
    out = np.empty(len(entries), dtype=np.float64)
    for i, ent in enumerate(entries):
        ne = len(ent)
        common = np.intersect1d(query, ent, assume_unique=True)
        inter = len(common)
        union = nq + ne - inter
        if metric == COSINE:
            out[i] = inter / math.sqrt(nq * ne) if nq and ne else 0.0
        elif metric == EUCLID_SIM:
            out[i] = 1.0 / (1.0 + math.sqrt(union - inter))
        elif metric == JACCARD:
            out[i] = inter / union if union else 0.0
        elif metric == WEIGHTED_JACCARD:
            assert weights is not None
            # accumulate in ascending feature-id order to match the
            # compiled kernel bit for bit
            w_inter = sum(float(w) for w in weights[common])
            w_union = sum(
                float(w)
                for w in weights[np.union1d(query, ent)]
            )
            out[i] = w_inter / w_union if w_union > 0.0 else 0.0
        else:
            raise ValueError(f"unknown metric code {metric}")
    return out
