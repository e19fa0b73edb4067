import math

import pytest
from hypothesis import given, strategies as st

from tacticforge.db import TacticDatabase


def fs(*ids):
    return frozenset(ids)


class TestInsert:
    def test_first_insert(self):
        db = TacticDatabase()
        seq = db.insert("f", "l", fs(1, 2), "auto")
        assert seq == 0
        assert db.size == 1

    def test_feature_counts(self):
        db = TacticDatabase()
        db.insert("f", "l", fs(1, 2), "auto")
        db.insert("f", "l", fs(1, 3), "intros")
        assert db.feature_counts[1] == 2
        assert db.feature_counts[2] == 1

    def test_empty_feature_set(self):
        db = TacticDatabase()
        db.insert("f", "l", fs(1), "auto")
        db.insert("f", "l", frozenset(), "auto")
        assert db.size == 2
        assert db.feature_counts == {1: 1}

    def test_tactic_normalized(self):
        db = TacticDatabase()
        db.insert("f", "l", fs(1), "  destruct   c ;  auto ")
        assert db.entries[0].tactic == "destruct c ; auto"


class TestTfidf:
    def test_full_count_is_zero(self):
        db = TacticDatabase()
        for i in range(8):
            db.insert("f", "l", fs(1), "t")
        assert db.tfidf(1) == 0.0

    def test_partial_count(self):
        db = TacticDatabase()
        for i in range(8):
            db.insert("f", "l", fs(1) | (fs(2) if i < 2 else fs()), "t")
        assert db.tfidf(2) == pytest.approx(math.log(4), abs=1e-12)

    def test_unseen_feature_clamped(self):
        db = TacticDatabase()
        for _ in range(8):
            db.insert("f", "l", fs(1), "t")
        assert db.tfidf(99) == pytest.approx(math.log(8), abs=1e-12)

    def test_empty_db(self):
        assert TacticDatabase().tfidf(1) == 0.0

    def test_weights_match_tfidf(self):
        db = TacticDatabase()
        db.insert("f", "l", fs(0, 1), "a")
        db.insert("f", "l", fs(1, 3), "b")
        w = db.tfidf_weights(5)
        for fid in range(5):
            assert w[fid] == db.tfidf(fid)

    @given(
        st.lists(
            st.frozensets(st.integers(0, 20), max_size=8), max_size=30
        )
    )
    def test_nonnegative(self, feature_sets):
        db = TacticDatabase()
        for f in feature_sets:
            db.insert("f", "l", f, "t")
        for fid in range(25):
            assert db.tfidf(fid) >= 0.0


class TestViews:
    def make(self):
        db = TacticDatabase()
        db.insert("f", "l1", fs(1), "a")
        db.insert("g", "l2", fs(2), "b")
        db.insert("f", "l1", fs(3), "c")
        return db

    def test_last_n(self):
        db = self.make()
        assert [e.seq for e in db.view(last_n=2)] == [1, 2]

    def test_last_n_larger_than_db(self):
        db = self.make()
        assert [e.seq for e in db.view(last_n=10)] == [0, 1, 2]

    def test_file_only(self):
        db = self.make()
        assert [e.seq for e in db.view(file_only="f")] == [0, 2]

    def test_exclude_lemma_all_match(self):
        db = self.make()
        view = db.view(exclude_lemma="l1")
        assert [e.seq for e in view] == [1]

    def test_snapshot_isolation(self):
        db = self.make()
        view = db.view()
        db.insert("f", "l3", fs(4), "d")
        assert [e.seq for e in view] == [0, 1, 2]

    def test_windows_nest(self):
        db = self.make()
        small = {e.seq for e in db.view(last_n=1)}
        large = {e.seq for e in db.view(last_n=3)}
        assert small <= large

    def test_mutually_exclusive_filters(self):
        db = self.make()
        with pytest.raises(ValueError):
            db.view(file_only="f", last_n=1)

    def test_negative_last_n(self):
        with pytest.raises(ValueError):
            self.make().view(last_n=-1)


@given(
    st.lists(
        st.tuples(
            st.frozensets(st.integers(0, 15), max_size=6),
            st.sampled_from(["auto", "intros", "split"]),
        ),
        max_size=40,
    )
)
def test_recount_equivalence(inserts):
    db = TacticDatabase()
    for features, tactic in inserts:
        db.insert("f", "l", features, tactic)
    recount = {}
    for e in db.entries:
        for fid in e.features:
            recount[fid] = recount.get(fid, 0) + 1
    assert recount == db.feature_counts
    assert all(v <= db.size for v in db.feature_counts.values())


@given(st.integers(0, 30), st.integers(0, 30))
def test_seq_monotone_in_views(n, m):
    db = TacticDatabase()
    for i in range(20):
        db.insert("f" if i % 2 else "g", f"l{i % 3}", frozenset([i]), "t")
    for view in (db.view(last_n=n), db.view(last_n=m), db.view(file_only="f")):
        seqs = [e.seq for e in view]
        assert seqs == sorted(seqs)
