import random

import numpy as np
import pytest

from tacticforge.lshf import EmptySet, ForestIndex, HashFamily, signature
from tacticforge.predict import jaccard


def rand_set(rng, vocab=500, lo=3, hi=40):
    return frozenset(rng.sample(range(vocab), rng.randrange(lo, hi)))


class TestSignature:
    def test_equal_sets_equal_signatures(self):
        fam = HashFamily(seed=3, depth=16)
        s = frozenset({4, 9, 100})
        assert np.array_equal(signature(s, fam), signature(frozenset(s), fam))

    def test_singleton(self):
        fam = HashFamily(seed=3, depth=8)
        sig = signature(frozenset({42}), fam)
        import tacticforge.kernels as kernels

        direct = kernels.minhash_signature(
            np.array([42], dtype=np.int64), fam.seeds
        )
        assert np.array_equal(sig, direct)

    def test_empty_set_rejected(self):
        with pytest.raises(EmptySet):
            signature(frozenset(), HashFamily(seed=0, depth=4))

    def test_seed_determinism(self):
        s = frozenset({1, 2, 3})
        a = signature(s, HashFamily(seed=5, depth=32))
        b = signature(s, HashFamily(seed=5, depth=32))
        c = signature(s, HashFamily(seed=6, depth=32))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_agreement_tracks_jaccard(self):
        # small-scale statistical check; the full D=128 test lives in
        # the acceptance suite
        rng = random.Random(7)
        fam = HashFamily(seed=1, depth=256)
        diffs = []
        for _ in range(200):
            base = rand_set(rng, lo=10, hi=60)
            other = frozenset(
                x for x in base if rng.random() < 0.7
            ) | rand_set(rng, lo=1, hi=10)
            agree = float(
                np.mean(signature(base, fam) == signature(other, fam))
            )
            diffs.append(agree - jaccard(base, other))
        assert abs(sum(diffs) / len(diffs)) < 0.05


class TestForestIndex:
    def test_insert_then_identical_query(self):
        idx = ForestIndex(seed=1)
        s = frozenset({1, 2, 3})
        idx.insert(0, s, "auto")
        preds = idx.query(s, 3)
        assert preds[0].tactic == "auto"
        assert preds[0].score == 1.0

    def test_disjoint_query_no_crash(self):
        idx = ForestIndex(seed=1)
        idx.insert(0, frozenset({1}), "a")
        idx.insert(1, frozenset({2}), "b")
        preds = idx.query(frozenset({99}), 5)
        assert all(p.score == 0.0 for p in preds)

    def test_empty_index(self):
        assert ForestIndex(seed=0).query(frozenset({1}), 4) == []

    def test_empty_feature_inserts_rejected(self):
        idx = ForestIndex(seed=0)
        with pytest.raises(EmptySet):
            idx.insert(0, frozenset(), "a")
        with pytest.raises(EmptySet):
            idx.query(frozenset(), 1)

    def test_containment_and_exact_scores(self):
        rng = random.Random(3)
        idx = ForestIndex(seed=2)
        sets = {}
        for seq in range(300):
            s = rand_set(rng)
            sets[seq] = s
            idx.insert(seq, s, f"t{seq}")
        q = rand_set(rng)
        for p in idx.query(q, 20):
            seq = p.source_seq
            assert seq in sets
            assert p.score == pytest.approx(jaccard(q, sets[seq]), abs=1e-15)

    def test_query_determinism(self):
        rng = random.Random(4)
        sets = [rand_set(rng) for _ in range(200)]

        def build():
            idx = ForestIndex(seed=11)
            for i, s in enumerate(sets):
                idx.insert(i, s, f"t{i % 17}")
            return idx

        q = rand_set(rng)
        assert build().query(q, 10) == build().query(q, 10)

    def test_pool_cap_bounds_scored_candidates(self):
        rng = random.Random(5)
        idx = ForestIndex(seed=0, pool_cap=64)
        for seq in range(1000):
            idx.insert(seq, rand_set(rng), f"t{seq}")
        idx.query(rand_set(rng), 10)
        assert idx.last_scored_count <= 64

    def test_dedup_keeps_best_per_tactic(self):
        idx = ForestIndex(seed=0)
        idx.insert(0, frozenset({1, 9}), "auto")
        idx.insert(1, frozenset({1, 2, 3}), "auto")
        preds = idx.query(frozenset({1, 2, 3}), 5)
        assert len(preds) == 1
        assert preds[0].source_seq == 1

    def test_allow_filter(self):
        idx = ForestIndex(seed=0)
        s = frozenset({1, 2, 3})
        idx.insert(0, s, "old")
        idx.insert(1, s, "new")
        preds = idx.query(s, 5, allow=lambda seq: seq == 0)
        assert [p.tactic for p in preds] == ["old"]

    def test_weighted_rerank_switch(self):
        from tacticforge.db import TacticDatabase

        db = TacticDatabase()
        db.insert("f", "l", frozenset({1, 2}), "a")
        db.insert("f", "l", frozenset({1, 3}), "b")
        idx = ForestIndex(seed=0, rerank="weighted", db=db)
        idx.insert(0, frozenset({1, 2}), "a")
        idx.insert(1, frozenset({1, 3}), "b")
        preds = idx.query(frozenset({1, 2}), 2)
        assert preds[0].tactic == "a"

    def test_growth_changes_pool_by_bounded_factor(self):
        rng = random.Random(6)
        small = ForestIndex(seed=9, pool_cap=256)
        big = ForestIndex(seed=9, pool_cap=256)
        sets = [rand_set(rng) for _ in range(2000)]
        for i, s in enumerate(sets[:200]):
            small.insert(i, s, f"t{i}")
        for i, s in enumerate(sets):
            big.insert(i, s, f"t{i}")
        q = rand_set(rng)
        small.query(q, 10)
        big.query(q, 10)
        assert big.last_scored_count <= 256
        assert small.last_scored_count <= 256
