"""Corpus model and JSONL ingestion.

A corpus file is described by a header record followed by its pair
and/or script records:

    {"file": "...", "deps": ["..."]}
    {"file": "...", "lemma": "...", "seq": 0,
     "state": {"hyps": ["..."], "goal": "..."}, "tactic": "..."}
    {"file": "...", "lemma": "...", "script": "...", "goal": "..."}

The optional ``goal`` on a script record is the lemma's initial goal,
needed to run the script on a rule kernel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from tacticforge.db import normalize_tactic
from tacticforge.terms import (
    MalformedTerm,
    ProofState,
    Term,
    parse_term,
    print_term,
)


class CorpusError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass
class Lemma:
    name: str
    pairs: list[tuple[ProofState, str]] = field(default_factory=list)
    script: str | None = None
    goal: Term | None = None


@dataclass
class CorpusFile:
    name: str
    deps: list[str]
    lemmas: list[Lemma] = field(default_factory=list)

    def lemma(self, name: str) -> Lemma:
        for lem in self.lemmas:
            if lem.name == name:
                return lem
        raise KeyError(name)


class Corpus:
    def __init__(self, files: Iterable[CorpusFile] = ()) -> None:
        self.files: list[CorpusFile] = list(files)
        self._by_name = {f.name: f for f in self.files}

    def __getitem__(self, name: str) -> CorpusFile:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def validate(self) -> None:
        """Check dependency resolution and acyclicity."""
        for f in self.files:
            for dep in f.deps:
                if dep not in self._by_name:
                    raise CorpusError(f"file {f.name!r}: unresolved dep {dep!r}")
        state: dict[str, int] = {}  # 1 = visiting, 2 = done

        def visit(name: str, trail: list[str]) -> None:
            mark = state.get(name)
            if mark == 2:
                return
            if mark == 1:
                raise CorpusError(f"dependency cycle: {' -> '.join(trail + [name])}")
            state[name] = 1
            for dep in self._by_name[name].deps:
                visit(dep, trail + [name])
            state[name] = 2

        for f in self.files:
            visit(f.name, [])

    def transitive_deps(self, name: str) -> list[str]:
        """Transitive dependency closure, in corpus file order."""
        closure: set[str] = set()

        def walk(n: str) -> None:
            for dep in self._by_name[n].deps:
                if dep not in closure:
                    closure.add(dep)
                    walk(dep)

        walk(name)
        return [f.name for f in self.files if f.name in closure]


def _parse_state(obj: dict, line: int) -> ProofState:
    try:
        hyps = tuple(parse_term(h) for h in obj["hyps"])
        goal = parse_term(obj["goal"])
    except MalformedTerm as exc:
        raise CorpusError(f"bad term: {exc}", line) from exc
    return ProofState(hyps, goal)


def ingest(paths: Iterable[str]) -> Corpus:
    """Read and validate JSONL corpus files; later paths append to earlier."""
    corpus = Corpus()
    line_no = 0
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            line_no = _ingest_stream(corpus, fh)
    corpus.validate()
    return corpus


def ingest_stream(fh: IO[str]) -> Corpus:
    corpus = Corpus()
    _ingest_stream(corpus, fh)
    corpus.validate()
    return corpus


def _ingest_stream(corpus: Corpus, fh: IO[str]) -> int:
    seqs_seen: dict[str, set[int]] = {
        f.name: {i for i, _ in enumerate(p for l in f.lemmas for p in l.pairs)}
        for f in corpus.files
    }
    line = 0
    for raw in fh:
        line += 1
        raw = raw.strip()
        if not raw:
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"bad JSON: {exc}", line) from exc
        if not isinstance(obj, dict) or "file" not in obj:
            raise CorpusError("record must be an object with a 'file' key", line)
        name = obj["file"]
        if "deps" in obj:  # header
            if name in corpus:
                raise CorpusError(f"duplicate header for file {name!r}", line)
            cf = CorpusFile(name, list(obj["deps"]))
            corpus.files.append(cf)
            corpus._by_name[name] = cf
            seqs_seen[name] = set()
            continue
        if name not in corpus:
            raise CorpusError(
                f"record for file {name!r} before its header", line
            )
        cf = corpus[name]
        if "lemma" not in obj:
            raise CorpusError("record needs a 'lemma' key", line)
        lemma_name = obj["lemma"]
        if not cf.lemmas or cf.lemmas[-1].name != lemma_name:
            existing = [l.name for l in cf.lemmas]
            if lemma_name in existing:
                lemma = cf.lemma(lemma_name)
            else:
                lemma = Lemma(lemma_name)
                cf.lemmas.append(lemma)
        else:
            lemma = cf.lemmas[-1]
        if "script" in obj:
            lemma.script = obj["script"]
            if "goal" in obj:
                try:
                    lemma.goal = parse_term(obj["goal"])
                except MalformedTerm as exc:
                    raise CorpusError(f"bad goal term: {exc}", line) from exc
            continue
        if "tactic" not in obj or "state" not in obj or "seq" not in obj:
            raise CorpusError("pair record needs seq, state and tactic", line)
        seq = obj["seq"]
        if seq in seqs_seen[name]:
            raise CorpusError(f"duplicate seq {seq} in file {name!r}", line)
        seqs_seen[name].add(seq)
        state = _parse_state(obj["state"], line)
        lemma.pairs.append((state, normalize_tactic(obj["tactic"])))
    return line


def export(corpus: Corpus, fh: IO[str]) -> None:
    """Write a corpus back out as normalized JSONL (inverse of ingest)."""
    for cf in corpus.files:
        fh.write(json.dumps({"file": cf.name, "deps": cf.deps}) + "\n")
        seq = 0
        for lemma in cf.lemmas:
            if lemma.script is not None:
                rec = {"file": cf.name, "lemma": lemma.name, "script": lemma.script}
                if lemma.goal is not None:
                    rec["goal"] = print_term(lemma.goal)
                fh.write(json.dumps(rec) + "\n")
            for state, tactic in lemma.pairs:
                fh.write(
                    json.dumps(
                        {
                            "file": cf.name,
                            "lemma": lemma.name,
                            "seq": seq,
                            "state": {
                                "hyps": [print_term(h) for h in state.hypotheses],
                                "goal": print_term(state.goal),
                            },
                            "tactic": tactic,
                        }
                    )
                    + "\n"
                )
                seq += 1
