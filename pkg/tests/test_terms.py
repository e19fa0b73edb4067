import threading

import pytest
from hypothesis import given, strategies as st

from tacticforge.terms import (
    MalformedTerm,
    ProofState,
    Term,
    feature_id,
    feature_text,
    parse_term,
    print_term,
    shingles,
    state_features,
)

labels = st.text(
    alphabet="abcdefxyz_0123456789+*", min_size=1, max_size=6
).filter(lambda s: s.strip() == s)


@st.composite
def terms(draw, depth=3):
    label = draw(labels)
    if depth == 0:
        return Term(label)
    children = draw(
        st.lists(terms(depth=depth - 1), min_size=0, max_size=3)
    )
    return Term(label, tuple(children))


def names(fids):
    return {feature_text(f) for f in fids}


class TestParse:
    def test_simple(self):
        t = parse_term("(plus x y)")
        assert t == Term("plus", (Term("x"), Term("y")))

    def test_leaf(self):
        assert parse_term("x") == Term("x")

    def test_nested(self):
        t = parse_term("(f (g a) b)")
        assert t.children[0] == Term("g", (Term("a"),))

    @pytest.mark.parametrize(
        "bad", ["(plus x", "", "  ", "()", "(", ")", "x y", "((f) x)", "(f x))"]
    )
    def test_malformed(self, bad):
        with pytest.raises(MalformedTerm):
            parse_term(bad)

    @given(terms())
    def test_round_trip(self, t):
        assert parse_term(print_term(t)) == t


class TestShingles:
    def test_worked_example(self):
        t = parse_term("(eq (plus (plus x y) z) (plus x (plus y z)))")
        expected = {
            "eq", "plus", "x", "y", "z",
            "eq_plus", "plus_x", "plus_y", "plus_z", "eq_z", "eq_x",
        }
        assert names(shingles(t)) == expected

    def test_leaf(self):
        assert names(shingles(Term("x"))) == {"x"}

    def test_equal_label_pair_excluded(self):
        t = parse_term("(f (f x))")
        assert names(shingles(t)) == {"f", "x", "f_x"}

    @given(terms())
    def test_size_bound(self, t):
        def count(node):
            return 1 + sum(count(c) for c in node.children)

        n = count(t)
        assert len(shingles(t)) <= 3 * n

    @given(terms())
    def test_subtree_unigrams_contained(self, t):
        whole = names(shingles(t))

        def walk(node):
            assert node.label in whole
            for c in node.children:
                walk(c)

        walk(t)

    @given(terms())
    def test_deterministic(self, t):
        assert shingles(t) == shingles(t)


class TestStateFeatures:
    def test_leaf_union(self):
        s = ProofState((parse_term("p"),), parse_term("q"))
        assert names(state_features(s)) == {"p", "q"}

    def test_shared_head(self):
        s = ProofState((parse_term("(f x)"),), parse_term("(f y)"))
        assert names(state_features(s)) == {"f", "x", "y", "f_x", "f_y"}

    def test_no_hypotheses(self):
        s = ProofState((), parse_term("x"))
        assert names(state_features(s)) == {"x"}


class TestInterning:
    def test_bijective(self):
        a = feature_id("some_feature_text")
        b = feature_id("some_feature_text")
        assert a == b
        assert feature_text(a) == "some_feature_text"

    def test_concurrent_interning_consistent(self):
        texts = [f"concurrent_feat_{i}" for i in range(200)]
        results = [dict() for _ in range(8)]

        def worker(out):
            for t in texts:
                out[t] = feature_id(t)

        threads = [
            threading.Thread(target=worker, args=(r,)) for r in results
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for r in results[1:]:
            assert r == results[0]
