"""Approximate top-k Jaccard neighbors via a MinHash LSH forest.

T prefix trees over depth-D MinHash signatures; each tree orders the
signature coordinates differently and stores items sorted by their
bucketed coordinate path, so a prefix of length d addresses exactly the
items agreeing with the query on the first d coordinates of that tree.
Queries collect a candidate pool walking the prefixes from deepest to
shallowest (synchronized across trees), then re-rank the pool with the
exact Jaccard index, so query cost is bounded by the pool cap
independent of index size.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass, field

import numpy as np

from tacticforge import kernels
from tacticforge.db import TacticDatabase, normalize_tactic
from tacticforge.predict import Prediction, _order_candidates, _weight_table_size

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = (z + _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class EmptySet(ValueError):
    """MinHash is undefined on the empty feature set."""


@dataclass(frozen=True)
class HashFamily:
    """D independent MinHash functions derived from one 64-bit seed."""

    seed: int
    depth: int
    seeds: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        derived = [_mix64((self.seed + i) & _MASK64) for i in range(self.depth)]
        object.__setattr__(
            self, "seeds", np.array(derived, dtype=np.uint64)
        )


def signature(features: frozenset[int], family: HashFamily) -> np.ndarray:
    """MinHash signature: values[i] = min over features of h_i(x)."""
    if not features:
        raise EmptySet("cannot take a MinHash signature of an empty set")
    arr = np.array(sorted(features), dtype=np.int64)
    return kernels.minhash_signature(arr, family.seeds)


class ForestIndex:
    """Incremental LSH forest over (seq, features, tactic) items."""

    def __init__(
        self,
        trees: int = 16,
        depth: int = 32,
        pool_cap: int = 1024,
        seed: int = 0,
        rerank: str = "jaccard",
        db: TacticDatabase | None = None,
    ) -> None:
        if rerank not in ("jaccard", "weighted"):
            raise ValueError(f"unknown rerank metric: {rerank}")
        if rerank == "weighted" and db is None:
            raise ValueError("weighted rerank needs a TacticDatabase")
        self.family = HashFamily(seed, depth)
        self.pool_cap = pool_cap
        self.rerank = rerank
        self.db = db
        rng = random.Random(_mix64(seed ^ 0x5F3759DF))
        self._orders = [rng.sample(range(depth), depth) for _ in range(trees)]
        # per tree: sorted list of (path bytes, seq)
        self._trees: list[list[tuple[bytes, int]]] = [[] for _ in range(trees)]
        self._items: dict[int, tuple[frozenset[int], np.ndarray, str]] = {}
        self.last_scored_count = 0

    def __len__(self) -> int:
        return len(self._items)

    def _paths(self, sig: np.ndarray) -> list[bytes]:
        buckets = (sig & np.uint64(0xFF)).astype(np.uint8)
        return [buckets[order].tobytes() for order in self._orders]

    def insert(self, seq: int, features: frozenset[int], tactic: str) -> None:
        if not features:
            raise EmptySet("empty feature sets are never indexed")
        sig = signature(features, self.family)
        for tree, path in zip(self._trees, self._paths(sig)):
            bisect.insort(tree, (path, seq))
        arr = np.array(sorted(features), dtype=np.int64)
        self._items[seq] = (features, arr, normalize_tactic(tactic))

    def _collect_pool(self, paths: list[bytes], allow) -> list[int]:
        """Candidate seqs, deepest prefix matches first, capped at pool_cap."""
        depth = self.family.depth
        pool: list[int] = []
        seen: set[int] = set()
        # previous (inner) range per tree; starts empty so the full-depth
        # matches are emitted on the first pass
        prev: list[tuple[int, int]] = []
        for tree, path in zip(self._trees, paths):
            lo = bisect.bisect_left(tree, (path,))
            prev.append((lo, lo))
        for d in range(depth, -1, -1):
            for t, (tree, path) in enumerate(zip(self._trees, paths)):
                prefix = path[:d]
                lo = bisect.bisect_left(tree, (prefix,))
                upper = prefix + b"\xff" * (depth - d)
                hi = bisect.bisect_right(tree, (upper, 1 << 62))
                plo, phi = prev[t]
                for idx in list(range(lo, plo)) + list(range(phi, hi)):
                    seq = tree[idx][1]
                    if seq in seen:
                        continue
                    seen.add(seq)
                    if allow is not None and not allow(seq):
                        continue
                    pool.append(seq)
                    if len(pool) >= self.pool_cap:
                        return pool
                prev[t] = (lo, hi)
        return pool

    def query(self, features: frozenset[int], k: int, allow=None) -> list[Prediction]:
        """Top-k predictions from the candidate pool, scored by exact Jaccard.

        ``allow`` optionally filters candidate seqs (used by the eval
        harness for windowed and intra-lemma-excluded views).
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if not features:
            raise EmptySet("cannot query with an empty feature set")
        self.last_scored_count = 0
        if not self._items:
            return []
        sig = signature(features, self.family)
        pool = self._collect_pool(self._paths(sig), allow)
        if not pool:
            return []
        self.last_scored_count = len(pool)
        q = np.array(sorted(features), dtype=np.int64)
        arrs = [self._items[seq][1] for seq in pool]
        if self.rerank == "weighted":
            weights = self.db.tfidf_weights(_weight_table_size(self.db, features))
            scores = kernels.score_batch(
                q, arrs, kernels.WEIGHTED_JACCARD, weights
            )
        else:
            scores = kernels.score_batch(q, arrs, kernels.JACCARD)
        scored = [
            (float(scores[i]), seq, self._items[seq][2])
            for i, seq in enumerate(pool)
        ]
        return _order_candidates(scored, k)
