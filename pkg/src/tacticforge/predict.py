"""Exhaustive k-NN tactic prediction plus Random and Reverse baselines.

Every predictor returns an ordered list of Predictions: pairwise
distinct tactics, non-increasing scores.  All scores are oriented so
higher is better; the euclid distance is mapped through 1/(1+d).
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

import numpy as np

from tacticforge import kernels, terms
from tacticforge.db import DbView, TacticDatabase


@dataclass(frozen=True)
class Prediction:
    score: float
    tactic: str
    source_seq: int


class Metric(enum.Enum):
    COSINE = kernels.COSINE
    EUCLID = kernels.EUCLID_SIM
    JACCARD = kernels.JACCARD
    WEIGHTED_JACCARD = kernels.WEIGHTED_JACCARD


def cosine(f1: frozenset[int], f2: frozenset[int]) -> float:
    """|f1 ∩ f2| / sqrt(|f1| |f2|); 0 if either set is empty."""
    if not f1 or not f2:
        return 0.0
    return len(f1 & f2) / math.sqrt(len(f1) * len(f2))


def euclid(f1: frozenset[int], f2: frozenset[int]) -> float:
    """sqrt(|f1 ∪ f2| - |f1 ∩ f2|): a distance, 0 iff the sets are equal."""
    return math.sqrt(len(f1 | f2) - len(f1 & f2))


def jaccard(f1: frozenset[int], f2: frozenset[int]) -> float:
    """|f1 ∩ f2| / |f1 ∪ f2|; 0 when both sets are empty."""
    union = len(f1 | f2)
    if union == 0:
        return 0.0
    return len(f1 & f2) / union


def weighted_jaccard(
    f1: frozenset[int], f2: frozenset[int], db: TacticDatabase
) -> float:
    """Tfidf-weighted Jaccard; 0 when the union's total weight is 0.

    Weights are accumulated in ascending feature-id order so the result
    is bitwise identical to the batch scoring kernels.
    """
    denom = sum(db.tfidf(x) for x in sorted(f1 | f2))
    if denom <= 0.0:
        return 0.0
    return sum(db.tfidf(x) for x in sorted(f1 & f2)) / denom


def _weight_table_size(db: TacticDatabase, query: frozenset[int]) -> int:
    """Dense weight array length covering the intern table, the db's
    features, and the query (tests may use raw uninterned ids)."""
    top = terms.intern_size() - 1
    if db.feature_counts:
        top = max(top, max(db.feature_counts))
    if query:
        top = max(top, max(query))
    return top + 1


def _order_candidates(
    scored: list[tuple[float, int, str]], k: int
) -> list[Prediction]:
    """Dedup by tactic keeping the best (score, then recency), then top-k.

    ``scored`` holds (score, seq, tactic) triples.  Ordering: score
    descending, then larger seq, then tactic text.
    """
    scored.sort(key=lambda t: (-t[0], -t[1], t[2]))
    out: list[Prediction] = []
    seen: set[str] = set()
    for score, seq, tactic in scored:
        if tactic in seen:
            continue
        seen.add(tactic)
        out.append(Prediction(score, tactic, seq))
        if len(out) == k:
            break
    return out


def knn_predict(
    view: DbView, query: frozenset[int], k: int, metric: Metric
) -> list[Prediction]:
    """Score every view entry against the query; best entry per tactic, top-k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    entries = view.entries()
    if not entries:
        return []
    weights = None
    if metric is Metric.WEIGHTED_JACCARD:
        weights = view.source.tfidf_weights(_weight_table_size(view.source, query))
    q = np.array(sorted(query), dtype=np.int64)
    scores = kernels.score_batch(
        q, [e.feature_arr for e in entries], metric.value, weights
    )
    scored = [
        (float(scores[i]), e.seq, e.tactic) for i, e in enumerate(entries)
    ]
    return _order_candidates(scored, k)


def reverse_predict(view: DbView, k: int) -> list[Prediction]:
    """Distinct tactics by descending last-seen seq; scores are 1/(1+rank)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    last_seen: dict[str, int] = {}
    for e in view:
        last_seen[e.tactic] = e.seq  # views iterate in seq order
    ranked = sorted(last_seen.items(), key=lambda kv: -kv[1])[:k]
    return [
        Prediction(1.0 / (1.0 + rank), tactic, seq)
        for rank, (tactic, seq) in enumerate(ranked)
    ]


def random_predict(view: DbView, k: int, rng_seed: int) -> list[Prediction]:
    """Up to k distinct tactics drawn uniformly without replacement."""
    if k < 1:
        raise ValueError("k must be >= 1")
    first_seen: dict[str, int] = {}
    for e in view:
        first_seen.setdefault(e.tactic, e.seq)
    tactics = list(first_seen)
    rng = random.Random(rng_seed)
    chosen = rng.sample(tactics, min(k, len(tactics)))
    return [
        Prediction(1.0 / (1.0 + rank), tactic, first_seen[tactic])
        for rank, tactic in enumerate(chosen)
    ]
