"""Offline prediction evaluation and proof-search evaluation.

Both protocols are dependency-faithful: a file's database is seeded from
its transitive dependencies only, and within a file every query sees
exactly the pairs recorded before it (insert-after-evaluate).  The
intra-lemma toggle controls whether pairs from the lemma currently being
proved are visible to its own queries.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from tacticforge.corpus import Corpus, CorpusError, Lemma
from tacticforge.db import DbView, TacticDatabase
from tacticforge.env import ProofEnv
from tacticforge.lshf import ForestIndex
from tacticforge.predict import (
    Metric,
    Prediction,
    knn_predict,
    random_predict,
    reverse_predict,
)
from tacticforge.search import (
    FOUND,
    SearchBudget,
    diagonal_search,
)
from tacticforge.terms import ProofState, state_features

METRIC_NAMES = {
    "cosine": Metric.COSINE,
    "euclid": Metric.EUCLID,
    "jaccard": Metric.JACCARD,
    "tfidf": Metric.WEIGHTED_JACCARD,
}

PREDICTOR_NAMES = tuple(METRIC_NAMES) + ("lshf", "random", "reverse")

# window: "all", "file", or ("last", n)
Window = str | tuple[str, int]


@dataclass(frozen=True)
class PredictionEvalConfig:
    predictor: str = "jaccard"
    k_max: int = 30
    intra_lemma: bool = True
    window: Window = "all"
    seed: int = 0
    lshf_trees: int = 16
    lshf_depth: int = 32
    lshf_pool_cap: int = 1024

    def __post_init__(self) -> None:
        if self.predictor not in PREDICTOR_NAMES:
            raise ValueError(f"unknown predictor {self.predictor!r}")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")


@dataclass
class CumulativeCurve:
    """proportions[k-1] = fraction of pairs whose tactic is in the top k."""

    proportions: list[float]
    pair_count: int
    theoretical_max: float


def _window_view(
    db: TacticDatabase, window: Window, file: str, exclude_lemma: str | None
) -> DbView:
    if window == "all":
        return db.view(exclude_lemma=exclude_lemma)
    if window == "file":
        return db.view(file_only=file, exclude_lemma=exclude_lemma)
    if isinstance(window, tuple) and window[0] == "last":
        return db.view(last_n=window[1], exclude_lemma=exclude_lemma)
    raise ValueError(f"unknown window {window!r}")


def _lshf_allow(
    db: TacticDatabase, window: Window, file: str, exclude_lemma: str | None
):
    """Candidate filter giving the LSHF predictor the same visibility as
    the equivalent DbView."""
    snapshot = db.size
    last_lo = None
    if isinstance(window, tuple) and window[0] == "last":
        last_lo = max(0, snapshot - window[1])

    def allow(seq: int) -> bool:
        if seq >= snapshot:
            return False
        entry = db.entries[seq]
        if window == "file" and entry.file != file:
            return False
        if last_lo is not None and seq < last_lo:
            return False
        if exclude_lemma is not None and entry.lemma == exclude_lemma:
            return False
        return True

    return allow


class _PredictorState:
    """Per-file database plus the incrementally maintained LSHF index."""

    def __init__(self, cfg, need_index: bool) -> None:
        self.db = TacticDatabase()
        self.index: ForestIndex | None = None
        if need_index:
            self.index = ForestIndex(
                trees=cfg.lshf_trees,
                depth=cfg.lshf_depth,
                pool_cap=cfg.lshf_pool_cap,
                seed=cfg.seed,
            )
        self.query_count = 0

    def insert(self, file: str, lemma: str, state: ProofState, tactic: str) -> None:
        features = state_features(state)
        seq = self.db.insert(file, lemma, features, tactic)
        if self.index is not None and features:
            self.index.insert(seq, features, tactic)

    def predict(
        self,
        cfg,
        predictor: str,
        file: str,
        lemma_excluded: str | None,
        query: frozenset[int],
        k: int,
    ) -> list[Prediction]:
        self.query_count += 1
        if predictor == "lshf":
            if not query or len(self.index) == 0:
                return []
            allow = _lshf_allow(self.db, cfg.window, file, lemma_excluded)
            return self.index.query(query, k, allow=allow)
        view = _window_view(self.db, cfg.window, file, lemma_excluded)
        if predictor in METRIC_NAMES:
            return knn_predict(view, query, k, METRIC_NAMES[predictor])
        if predictor == "random":
            return random_predict(view, k, cfg.seed + self.query_count)
        if predictor == "reverse":
            return reverse_predict(view, k)
        raise ValueError(f"unknown predictor {predictor!r}")


def _seed_from_deps(corpus: Corpus, file_name: str, state: _PredictorState) -> None:
    for dep in corpus.transitive_deps(file_name):
        for lemma in corpus[dep].lemmas:
            for st, tactic in lemma.pairs:
                state.insert(dep, lemma.name, st, tactic)


def eval_predictions(
    corpus: Corpus, config: PredictionEvalConfig
) -> CumulativeCurve:
    """Fig.-1-style protocol: per pair, predict from what was known before
    it, tally the true tactic's rank, then insert the pair."""
    corpus.validate()
    hits = [0] * config.k_max
    total = 0
    available = 0
    for cf in corpus.files:
        pstate = _PredictorState(config, config.predictor == "lshf")
        _seed_from_deps(corpus, cf.name, pstate)
        for lemma in cf.lemmas:
            excl = None if config.intra_lemma else lemma.name
            for st, tactic in lemma.pairs:
                query = state_features(st)
                view = _window_view(pstate.db, config.window, cf.name, excl)
                if any(e.tactic == tactic for e in view):
                    available += 1
                preds = pstate.predict(
                    config, config.predictor, cf.name, excl, query, config.k_max
                )
                for rank, p in enumerate(preds):
                    if p.tactic == tactic:
                        hits[rank] += 1
                        break
                total += 1
                pstate.insert(cf.name, lemma.name, st, tactic)
    proportions = []
    acc = 0
    for k in range(config.k_max):
        acc += hits[k]
        proportions.append(acc / total if total else 0.0)
    tmax = available / total if total else 0.0
    return CumulativeCurve(proportions, total, tmax)


def theoretical_max(corpus: Corpus, config: PredictionEvalConfig) -> float:
    """Fraction of pairs whose true tactic is in the view available to them."""
    corpus.validate()
    total = 0
    available = 0
    for cf in corpus.files:
        pstate = _PredictorState(config, need_index=False)
        _seed_from_deps(corpus, cf.name, pstate)
        for lemma in cf.lemmas:
            excl = None if config.intra_lemma else lemma.name
            for st, tactic in lemma.pairs:
                view = _window_view(pstate.db, config.window, cf.name, excl)
                if any(e.tactic == tactic for e in view):
                    available += 1
                total += 1
                pstate.insert(cf.name, lemma.name, st, tactic)
    return available / total if total else 0.0


@dataclass(frozen=True)
class SearchConfig:
    name: str
    predictor: str = "jaccard"
    window: Window = "all"
    seed: int = 0
    lshf_trees: int = 16
    lshf_depth: int = 32
    lshf_pool_cap: int = 1024

    def __post_init__(self) -> None:
        if self.predictor not in PREDICTOR_NAMES:
            raise ValueError(f"unknown predictor {self.predictor!r}")


@dataclass
class LemmaSearchRecord:
    file: str
    lemma: str
    development: str
    original_length: int
    # per config name: (success, found length or None, expansions, elapsed)
    results: dict[str, tuple[bool, int | None, int, float]] = field(
        default_factory=dict
    )

    @property
    def union_success(self) -> bool:
        return any(ok for ok, _, _, _ in self.results.values())


@dataclass
class DevelopmentRow:
    development: str
    lemma_count: int
    q2: int
    q3: int
    max_length: int
    success_rates: dict[str, float]
    union_rate: float


@dataclass
class SearchReport:
    config_names: list[str]
    lemmas: list[LemmaSearchRecord]
    rows: list[DevelopmentRow]
    found_hist: dict[str, Counter]
    original_hist: Counter


def nearest_rank_quartile(sorted_vals: list[int], p: float) -> int:
    """Nearest-rank percentile of an ascending list (integer-valued)."""
    if not sorted_vals:
        return 0
    idx = math.ceil(p * len(sorted_vals))
    return sorted_vals[max(0, idx - 1)]


def development_of(file_name: str) -> str:
    """Top-level path component, mirroring a stdlib-style breakdown."""
    return file_name.split("/")[0] if "/" in file_name else file_name


def _root_stack(lemma: Lemma):
    if lemma.goal is not None:
        return (ProofState((), lemma.goal),)
    if lemma.pairs:
        return (lemma.pairs[0][0],)
    raise CorpusError(f"lemma {lemma.name!r} has neither a goal nor pairs")


def eval_search(
    corpus: Corpus,
    env: ProofEnv,
    configs: list[SearchConfig],
    budget: SearchBudget,
) -> SearchReport:
    """Table-1-style protocol: per lemma, try to synthesize a proof from
    the current database under each configuration, then add the lemma's
    recorded pairs regardless of success."""
    corpus.validate()
    if len({c.name for c in configs}) != len(configs):
        raise ValueError("search config names must be unique")
    need_index = any(c.predictor == "lshf" for c in configs)
    records: list[LemmaSearchRecord] = []
    for cf in corpus.files:
        # all configs share one db; lshf settings come from the first
        # lshf config (one index per file)
        index_cfg = next(
            (c for c in configs if c.predictor == "lshf"), configs[0]
        )
        pstate = _PredictorState(index_cfg, need_index)
        _seed_from_deps(corpus, cf.name, pstate)
        for lemma in cf.lemmas:
            record = LemmaSearchRecord(
                cf.name,
                lemma.name,
                development_of(cf.name),
                len(lemma.pairs),
            )
            root = _root_stack(lemma)
            for cfg in configs:
                def predict(query: frozenset[int], _cfg=cfg) -> list[Prediction]:
                    return pstate.predict(
                        _cfg, _cfg.predictor, cf.name, None, query, budget.k
                    )

                result = diagonal_search(env, root, predict, budget)
                found = result.outcome == FOUND
                record.results[cfg.name] = (
                    found,
                    len(result.script) if found else None,
                    result.stats.expansions,
                    result.stats.elapsed,
                )
            records.append(record)
            for st, tactic in lemma.pairs:
                pstate.insert(cf.name, lemma.name, st, tactic)
    return _build_report([c.name for c in configs], records)


def _build_report(
    config_names: list[str], records: list[LemmaSearchRecord]
) -> SearchReport:
    rows: list[DevelopmentRow] = []
    devs: dict[str, list[LemmaSearchRecord]] = {}
    for rec in records:
        devs.setdefault(rec.development, []).append(rec)
    for dev, recs in devs.items():
        lengths = sorted(r.original_length for r in recs)
        rates = {
            name: sum(1 for r in recs if r.results[name][0]) / len(recs)
            for name in config_names
        }
        rows.append(
            DevelopmentRow(
                dev,
                len(recs),
                nearest_rank_quartile(lengths, 0.5),
                nearest_rank_quartile(lengths, 0.75),
                lengths[-1] if lengths else 0,
                rates,
                sum(1 for r in recs if r.union_success) / len(recs),
            )
        )
    found_hist: dict[str, Counter] = {name: Counter() for name in config_names}
    for rec in records:
        for name in config_names:
            ok, length, _, _ = rec.results[name]
            if ok:
                found_hist[name][length] += 1
    original_hist = Counter(r.original_length for r in records)
    return SearchReport(config_names, records, rows, found_hist, original_hist)


def length_stats(corpus: Corpus):
    """Per-development proof-length quartiles plus a global histogram."""
    rows = []
    devs: dict[str, list[int]] = {}
    for cf in corpus.files:
        devs.setdefault(development_of(cf.name), []).extend(
            len(lemma.pairs) for lemma in cf.lemmas
        )
    for dev, lengths in devs.items():
        lengths.sort()
        rows.append(
            (
                dev,
                len(lengths),
                nearest_rank_quartile(lengths, 0.5),
                nearest_rank_quartile(lengths, 0.75),
                lengths[-1] if lengths else 0,
            )
        )
    hist = Counter(
        len(lemma.pairs) for cf in corpus.files for lemma in cf.lemmas
    )
    return rows, hist
