"""Append-only store of recorded (state-features, tactic) pairs.

Entries carry provenance (file, lemma, global seq) and the database
maintains per-feature occurrence counts for TfIdf weighting.  Views are
immutable snapshots filtered by file, recency window, or lemma
exclusion; single-writer / multi-reader, so a view taken between inserts
never observes later entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np


def normalize_tactic(text: str) -> str:
    """Collapse runs of whitespace and trim, so tactic equality is meaningful."""
    return " ".join(text.split())


@dataclass(frozen=True)
class TacticEntry:
    file: str
    lemma: str
    seq: int
    features: frozenset[int]
    tactic: str
    # sorted feature ids, kept alongside the set for the scoring kernels
    feature_arr: np.ndarray = field(repr=False, compare=False, default=None)


class TacticDatabase:
    """Append-only sequence of TacticEntry with feature frequency stats."""

    def __init__(self) -> None:
        self.entries: list[TacticEntry] = []
        self.feature_counts: dict[int, int] = {}

    @property
    def size(self) -> int:
        return len(self.entries)

    def insert(
        self, file: str, lemma: str, features: frozenset[int], tactic: str
    ) -> int:
        """Append an entry; returns its seq id (dense, insertion-ordered)."""
        seq = len(self.entries)
        arr = np.array(sorted(features), dtype=np.int64)
        entry = TacticEntry(file, lemma, seq, features, normalize_tactic(tactic), arr)
        for fid in features:
            self.feature_counts[fid] = self.feature_counts.get(fid, 0) + 1
        self.entries.append(entry)
        return seq

    def tfidf(self, fid: int) -> float:
        """log(N / count), counting entries containing the feature.

        The denominator is clamped to 1 so query-only features get the
        maximal finite weight; an empty database yields 0.
        """
        n = len(self.entries)
        if n == 0:
            return 0.0
        return math.log(n / max(1, self.feature_counts.get(fid, 0)))

    def tfidf_weights(self, size: int) -> np.ndarray:
        """Dense tfidf weight array over feature ids 0..size-1."""
        n = len(self.entries)
        out = np.zeros(size, dtype=np.float64)
        if n == 0:
            return out
        counts = self.feature_counts
        for fid in range(size):
            out[fid] = math.log(n / max(1, counts.get(fid, 0)))
        return out

    def view(
        self,
        file_only: str | None = None,
        last_n: int | None = None,
        exclude_lemma: str | None = None,
    ) -> "DbView":
        """Snapshot view of the current entries under the given filters.

        ``file_only`` and ``last_n`` are mutually exclusive window
        choices (neither means "all"); ``exclude_lemma`` intersects with
        the window.
        """
        if file_only is not None and last_n is not None:
            raise ValueError("file_only and last_n are mutually exclusive")
        if last_n is not None and last_n < 0:
            raise ValueError("last_n must be >= 0")
        return DbView(self, len(self.entries), file_only, last_n, exclude_lemma)


@dataclass(frozen=True)
class DbView:
    source: TacticDatabase
    snapshot: int  # entries with seq < snapshot are visible
    file_only: str | None = None
    last_n: int | None = None
    exclude_lemma: str | None = None

    def __iter__(self) -> Iterator[TacticEntry]:
        entries = self.source.entries[: self.snapshot]
        if self.last_n is not None:
            entries = entries[max(0, len(entries) - self.last_n) :]
        for e in entries:
            if self.file_only is not None and e.file != self.file_only:
                continue
            if self.exclude_lemma is not None and e.lemma == self.exclude_lemma:
                continue
            yield e

    def entries(self) -> list[TacticEntry]:
        return list(self)
