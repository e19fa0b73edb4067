"""Command-line entry point.

Subcommands: ingest, eval-knn, search, eval-search, record, stats.
Exit codes: 0 success, 1 usage error, 2 corpus error.
"""

from __future__ import annotations

import argparse
import os
import sys

from tacticforge import corpus as corpus_mod
from tacticforge import harness
from tacticforge.corpus import CorpusError
from tacticforge.env import RuleKernel, Solved, run_script
from tacticforge.recorder import RecordingSession
from tacticforge.script import instrument, parse_script
from tacticforge.search import FOUND, SearchBudget, diagonal_search
from tacticforge.terms import ProofState
from tacticforge.harness import (
    PredictionEvalConfig,
    SearchConfig,
    development_of,
    eval_predictions,
    eval_search,
    length_stats,
)

PREDICTOR_CHOICES = list(harness.PREDICTOR_NAMES)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 instead of argparse's 2
        raise UsageError(message)


def _parse_window(text: str) -> harness.Window:
    if text in ("all", "file"):
        return text
    if text.startswith("last:"):
        try:
            n = int(text[len("last:") :])
        except ValueError:
            raise UsageError(f"bad window {text!r}")
        if n < 0:
            raise UsageError("window last:N needs N >= 0")
        return ("last", n)
    raise UsageError(f"bad window {text!r} (expected file, last:N, or all)")


def _parse_search_config(text: str, seed: int) -> SearchConfig:
    """Config strings: ``predictor`` or ``predictor:window``, e.g.
    ``jaccard``, ``tfidf:last:1000``, ``lshf``, ``jaccard:file``."""
    if ":" in text:
        predictor, window_text = text.split(":", 1)
        window = _parse_window(window_text)
    else:
        predictor, window = text, "all"
    if predictor not in PREDICTOR_CHOICES:
        raise UsageError(f"unknown predictor {predictor!r} in config {text!r}")
    return SearchConfig(text, predictor, window, seed)


def _default_seed() -> int:
    env = os.environ.get("TACTIC_FORGE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"bad TACTIC_FORGE_SEED value {env!r}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="tacticforge")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a JSONL corpus")
    p.add_argument("paths", nargs="+")

    p = sub.add_parser("eval-knn", help="offline prediction evaluation")
    p.add_argument("paths", nargs="+")
    p.add_argument("--metric", choices=PREDICTOR_CHOICES, default="jaccard")
    p.add_argument("--kmax", type=int, default=30)
    p.add_argument(
        "--intra-lemma",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="allow learning from pairs of the lemma being predicted",
    )
    p.add_argument("--window", default="all", help="file, last:N, or all")
    p.add_argument("--out", help="write the cumulative curve CSV here")

    p = sub.add_parser("search", help="search a proof for a single lemma")
    p.add_argument("paths", nargs="+")
    p.add_argument("--rules", required=True, help="rule kernel JSON file")
    p.add_argument("--file", required=True)
    p.add_argument("--lemma", required=True)
    p.add_argument("--predictor", choices=PREDICTOR_CHOICES, default="jaccard")
    p.add_argument("--window", default="all")
    p.add_argument("--budget-expansions", type=int)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--k", type=int, default=16)

    p = sub.add_parser("eval-search", help="full search evaluation protocol")
    p.add_argument("paths", nargs="+")
    p.add_argument("--rules", required=True)
    p.add_argument(
        "--config",
        action="append",
        default=None,
        help="predictor[:window], repeatable (e.g. jaccard, tfidf:last:1000)",
    )
    p.add_argument("--budget-expansions", type=int)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--out", help="write the per-development report CSV here")
    p.add_argument("--hist-out", help="write the found-length histogram CSV here")

    p = sub.add_parser("record", help="run instrumented scripts, emit pairs")
    p.add_argument("paths", nargs="+")
    p.add_argument("--rules", required=True)
    p.add_argument("--out", required=True, help="output pair-record JSONL")

    p = sub.add_parser("stats", help="proof-length quartiles and histogram")
    p.add_argument("paths", nargs="+")
    p.add_argument("--out", help="write the per-development CSV here")
    p.add_argument("--hist-out", help="write the length histogram CSV here")

    return parser


def _budget(args) -> SearchBudget:
    if args.budget_expansions is None and args.budget_seconds is None:
        return SearchBudget(max_expansions=10000, k=args.k)
    return SearchBudget(
        wall_clock=args.budget_seconds,
        max_expansions=args.budget_expansions,
        k=args.k,
    )


def _write_or_print(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def curve_csv(curve: harness.CumulativeCurve) -> str:
    return "".join(
        f"{k + 1},{p:.6f}\n" for k, p in enumerate(curve.proportions)
    )


def report_csv(report: harness.SearchReport) -> str:
    cols = ["development", "lemmas", "q2", "q3", "max"]
    cols += report.config_names + ["union"]
    lines = [",".join(cols)]
    for row in report.rows:
        cells = [
            row.development,
            str(row.lemma_count),
            str(row.q2),
            str(row.q3),
            str(row.max_length),
        ]
        cells += [f"{row.success_rates[c]:.6f}" for c in report.config_names]
        cells.append(f"{row.union_rate:.6f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def hist_csv(hist) -> str:
    return "".join(f"{length},{count}\n" for length, count in sorted(hist.items()))


def _cmd_ingest(args) -> int:
    corpus = corpus_mod.ingest(args.paths)
    pairs = sum(len(l.pairs) for f in corpus.files for l in f.lemmas)
    lemmas = sum(len(f.lemmas) for f in corpus.files)
    print(f"ok: {len(corpus.files)} files, {lemmas} lemmas, {pairs} pairs")
    return 0


def _cmd_eval_knn(args, seed: int) -> int:
    corpus = corpus_mod.ingest(args.paths)
    config = PredictionEvalConfig(
        predictor=args.metric,
        k_max=args.kmax,
        intra_lemma=args.intra_lemma,
        window=_parse_window(args.window),
        seed=seed,
    )
    curve = eval_predictions(corpus, config)
    _write_or_print(curve_csv(curve), args.out)
    top1 = curve.proportions[0] if curve.proportions else 0.0
    print(
        f"pairs={curve.pair_count} top1={top1:.6f} "
        f"theoretical_max={curve.theoretical_max:.6f}",
        file=sys.stderr,
    )
    return 0


def _cmd_search(args, seed: int) -> int:
    corpus = corpus_mod.ingest(args.paths)
    env = RuleKernel.from_json(args.rules)
    if args.file not in corpus:
        raise CorpusError(f"no such file {args.file!r}")
    cf = corpus[args.file]
    try:
        lemma = cf.lemma(args.lemma)
    except KeyError:
        raise CorpusError(f"no lemma {args.lemma!r} in file {args.file!r}")
    # learn from deps and from the file's lemmas preceding the target
    cfg = SearchConfig("search", args.predictor, _parse_window(args.window), seed)
    pstate = harness._PredictorState(cfg, cfg.predictor == "lshf")
    harness._seed_from_deps(corpus, cf.name, pstate)
    for prior in cf.lemmas:
        if prior.name == lemma.name:
            break
        for st, tactic in prior.pairs:
            pstate.insert(cf.name, prior.name, st, tactic)
    budget = _budget(args)

    def predict(query):
        return pstate.predict(cfg, cfg.predictor, cf.name, None, query, budget.k)

    root = harness._root_stack(lemma)
    result = diagonal_search(env, root, predict, budget)
    if result.outcome == FOUND:
        assert result.script is not None
        print("; ".join(result.script))
        print(
            f"found length={len(result.script)} "
            f"expansions={result.stats.expansions}",
            file=sys.stderr,
        )
    else:
        print(
            f"{result.outcome} expansions={result.stats.expansions}",
            file=sys.stderr,
        )
    return 0


def _cmd_eval_search(args, seed: int) -> int:
    corpus = corpus_mod.ingest(args.paths)
    env = RuleKernel.from_json(args.rules)
    config_texts = args.config or ["jaccard"]
    configs = [_parse_search_config(t, seed) for t in config_texts]
    report = eval_search(corpus, env, configs, _budget(args))
    _write_or_print(report_csv(report), args.out)
    if args.hist_out:
        merged = sum(report.found_hist.values(), start=type(report.original_hist)())
        _write_or_print(hist_csv(merged), args.hist_out)
    total = len(report.lemmas)
    union = sum(1 for r in report.lemmas if r.union_success)
    print(f"lemmas={total} union_success={union}", file=sys.stderr)
    return 0


def _cmd_record(args) -> int:
    corpus = corpus_mod.ingest(args.paths)
    env = RuleKernel.from_json(args.rules)
    skipped = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for cf in corpus.files:
            out.write(
                corpus_mod.json.dumps({"file": cf.name, "deps": cf.deps}) + "\n"
            )
            next_seq = 0
            for lemma in cf.lemmas:
                if lemma.script is None or lemma.goal is None:
                    continue
                session = RecordingSession(
                    cf.name, lemma.name, sink=[], start_seq=next_seq
                )
                ast = instrument(parse_script(lemma.script))
                stack = (ProofState((), lemma.goal),)
                outcome = run_script(env, stack, ast, recorder=session.as_recorder())
                if not isinstance(outcome, Solved):
                    skipped += 1
                    print(
                        f"skipping {cf.name}/{lemma.name}: script did not "
                        f"solve the goal ({outcome!r})",
                        file=sys.stderr,
                    )
                    continue
                for record in session.sink:
                    out.write(corpus_mod.json.dumps(record) + "\n")
                next_seq = session.next_seq
    if skipped:
        print(f"skipped {skipped} unsolved lemmas", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    corpus = corpus_mod.ingest(args.paths)
    rows, hist = length_stats(corpus)
    lines = ["development,lemmas,q2,q3,max"]
    for dev, n, q2, q3, mx in rows:
        lines.append(f"{dev},{n},{q2},{q3},{mx}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    if args.hist_out or args.out is None:
        _write_or_print(hist_csv(hist), args.hist_out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        seed = args.seed if args.seed is not None else _default_seed()
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "eval-knn":
            return _cmd_eval_knn(args, seed)
        if args.command == "search":
            return _cmd_search(args, seed)
        if args.command == "eval-search":
            return _cmd_eval_search(args, seed)
        if args.command == "record":
            return _cmd_record(args)
        if args.command == "stats":
            return _cmd_stats(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (CorpusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
