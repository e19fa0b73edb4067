"""Term ASTs, feature interning, and shingle feature extraction.

A term is a rooted ordered tree of identifiers, serialized as an
s-expression: ``ident`` or ``(ident child...)``.  Features are the
one-shingles (node labels) and two-shingles (ordered ancestor/descendant
label pairs at tree distance 1 or 2, with equal-label pairs excluded) of
a term.  Features are interned process-wide into dense integer ids so
that all downstream set arithmetic runs on ints.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field


class MalformedTerm(ValueError):
    """Raised when term text is not a well-formed s-expression."""


@dataclass(frozen=True)
class Term:
    label: str
    children: tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if not self.label or re.search(r"[\s()]", self.label):
            raise MalformedTerm(f"bad term label: {self.label!r}")


@dataclass(frozen=True)
class ProofState:
    """Hypothesis terms plus the goal term. The goal is always present."""

    hypotheses: tuple[Term, ...]
    goal: Term


_TOKEN_RE = re.compile(r"\(|\)|[^()\s]+")


def parse_term(text: str) -> Term:
    """Parse an s-expression into a Term.

    Raises MalformedTerm on unbalanced parentheses, an empty head, or
    trailing garbage.
    """
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise MalformedTerm("empty input")
    term, pos = _parse_at(tokens, 0)
    if pos != len(tokens):
        raise MalformedTerm(f"trailing garbage at token {pos}: {tokens[pos]!r}")
    return term


def _parse_at(tokens: list[str], pos: int) -> tuple[Term, int]:
    tok = tokens[pos]
    if tok == ")":
        raise MalformedTerm(f"unexpected ')' at token {pos}")
    if tok != "(":
        return Term(tok), pos + 1
    pos += 1
    if pos >= len(tokens) or tokens[pos] in "()":
        raise MalformedTerm("expected identifier after '('")
    label = tokens[pos]
    pos += 1
    children = []
    while True:
        if pos >= len(tokens):
            raise MalformedTerm("unbalanced parentheses: missing ')'")
        if tokens[pos] == ")":
            return Term(label, tuple(children)), pos + 1
        child, pos = _parse_at(tokens, pos)
        children.append(child)


def print_term(t: Term) -> str:
    """Serialize a Term back to its s-expression; inverse of parse_term."""
    if not t.children:
        return t.label
    return "({} {})".format(t.label, " ".join(print_term(c) for c in t.children))


class _InternTable:
    """Process-global bijective feature-text <-> dense-id table.

    Thread-safe: concurrent interning of the same text always yields the
    same id.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._by_text: dict[str, int] = {}
        self._texts: list[str] = []

    def intern(self, text: str) -> int:
        fid = self._by_text.get(text)
        if fid is not None:
            return fid
        with self._lock:
            fid = self._by_text.get(text)
            if fid is None:
                fid = len(self._texts)
                self._texts.append(text)
                self._by_text[text] = fid
            return fid

    def text(self, fid: int) -> str:
        return self._texts[fid]

    def size(self) -> int:
        return len(self._texts)


_TABLE = _InternTable()


def feature_id(text: str) -> int:
    """Intern a feature's canonical text (``a`` or ``a_b``) into its id."""
    return _TABLE.intern(text)


def feature_text(fid: int) -> str:
    return _TABLE.text(fid)


def intern_size() -> int:
    """Number of distinct features interned so far (ids are 0..size-1)."""
    return _TABLE.size()


def shingles(t: Term) -> frozenset[int]:
    """Feature set of a term: unigrams of every node label plus bigrams
    ``ancestor_descendant`` for node pairs at tree distance 1 or 2 with
    distinct labels."""
    out: set[int] = set()
    # stack of (node, parent_label, grandparent_label)
    stack: list[tuple[Term, str | None, str | None]] = [(t, None, None)]
    while stack:
        node, parent, grand = stack.pop()
        out.add(_TABLE.intern(node.label))
        for anc in (parent, grand):
            if anc is not None and anc != node.label:
                out.add(_TABLE.intern(f"{anc}_{node.label}"))
        for child in node.children:
            stack.append((child, node.label, parent))
    return frozenset(out)


def state_features(s: ProofState) -> frozenset[int]:
    """Union of shingles over every hypothesis term and the goal term."""
    out = set(shingles(s.goal))
    for h in s.hypotheses:
        out |= shingles(h)
    return frozenset(out)
