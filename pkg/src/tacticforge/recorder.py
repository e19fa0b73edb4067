"""Recording sessions: bridge from script execution to pair records.

A session collects the (proof state, tactic text) pairs emitted by
Recorded script nodes, assigns file-scoped seq ids, and writes them to
an in-memory list or a JSONL stream in the corpus pair-record schema.
"""

from __future__ import annotations

import json
from typing import IO

from tacticforge.db import normalize_tactic
from tacticforge.terms import ProofState, print_term


class SinkError(RuntimeError):
    pass


class RecordingSession:
    """One session per (file, lemma); seq continues across a file's sessions."""

    def __init__(
        self,
        file: str,
        lemma: str,
        sink: list | IO[str] | None = None,
        start_seq: int = 0,
    ) -> None:
        self.file = file
        self.lemma = lemma
        self.sink = [] if sink is None else sink
        self.next_seq = start_seq
        self.pairs: list[tuple[ProofState, str]] = []

    def record_pair(self, state: ProofState, tactic: str) -> None:
        """Append one pair with the next seq; called before tactic execution."""
        tactic = normalize_tactic(tactic)
        record = {
            "file": self.file,
            "lemma": self.lemma,
            "seq": self.next_seq,
            "state": {
                "hyps": [print_term(h) for h in state.hypotheses],
                "goal": print_term(state.goal),
            },
            "tactic": tactic,
        }
        try:
            if isinstance(self.sink, list):
                self.sink.append(record)
            else:
                self.sink.write(json.dumps(record) + "\n")
        except OSError as exc:
            raise SinkError(str(exc)) from exc
        self.pairs.append((state, tactic))
        self.next_seq += 1

    def as_recorder(self):
        """Callback suitable for ``run_script``'s recorder argument."""
        return self.record_pair
