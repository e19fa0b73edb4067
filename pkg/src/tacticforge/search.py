"""Diagonal best-first proof search.

A node reached by prediction ranks r1..rn costs sum(1 + ri); expanding
nodes in (cost, path-length, lexicographic rank path) order realizes the
diagonal discipline: the subtree under a rank-i prediction is always
explored one layer deeper than the subtree under its rank-(i+1) sibling.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Callable

from tacticforge.env import (
    Failure,
    GoalStack,
    ProofEnv,
    ProofOutcome,
    Progress,
    Solved,
    apply_tactic,
    stack_key,
)
from tacticforge.predict import Prediction
from tacticforge.terms import state_features

PredictFn = Callable[[frozenset[int]], list[Prediction]]

FOUND = "found"
EXHAUSTED = "exhausted"
BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class SearchBudget:
    wall_clock: float | None = None
    max_expansions: int | None = None
    k: int = 16

    def __post_init__(self) -> None:
        if self.wall_clock is None and self.max_expansions is None:
            raise ValueError("at least one budget limit must be set")
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass
class SearchStats:
    expansions: int = 0
    applications: int = 0
    elapsed: float = 0.0
    max_depth: int = 0
    trace: list[tuple[int, ...]] | None = None


@dataclass(frozen=True)
class SearchResult:
    outcome: str  # FOUND | EXHAUSTED | BUDGET_EXCEEDED
    script: tuple[str, ...] | None
    stats: SearchStats


@dataclass(frozen=True)
class _Node:
    stack: GoalStack
    rank_path: tuple[int, ...]
    cost: int
    script: tuple[str, ...]


def diagonal_search(
    env: ProofEnv,
    root_stack: GoalStack,
    predict: PredictFn,
    budget: SearchBudget,
    collect_trace: bool = False,
) -> SearchResult:
    """Search for a tactic script solving the root stack.

    ``predict`` maps the focused goal's feature set to an ordered
    prediction list (it receives budget.k via closure or ignores k).
    Returns FOUND with a script that replays to Solved, EXHAUSTED when
    the queue empties, or BUDGET_EXCEEDED.
    """
    if not root_stack:
        raise ValueError("root goal stack is empty")
    start = time.monotonic()
    stats = SearchStats(trace=[] if collect_trace else None)
    heap: list[tuple[int, int, tuple[int, ...], _Node]] = []
    root = _Node(root_stack, (), 0, ())
    heapq.heappush(heap, (0, 0, (), root))
    visited: set[str] = set()
    while heap:
        if budget.max_expansions is not None and stats.expansions >= budget.max_expansions:
            stats.elapsed = time.monotonic() - start
            return SearchResult(BUDGET_EXCEEDED, None, stats)
        if budget.wall_clock is not None and time.monotonic() - start > budget.wall_clock:
            stats.elapsed = time.monotonic() - start
            return SearchResult(BUDGET_EXCEEDED, None, stats)
        _, _, _, node = heapq.heappop(heap)
        key = stack_key(node.stack)
        if key in visited:
            continue
        visited.add(key)
        stats.expansions += 1
        stats.max_depth = max(stats.max_depth, len(node.rank_path))
        if stats.trace is not None:
            stats.trace.append(node.rank_path)
        predictions = predict(state_features(node.stack[0]))[: budget.k]
        for rank, pred in enumerate(predictions):
            outcome = apply_tactic(env, node.stack, pred.tactic)
            stats.applications += 1
            if isinstance(outcome, Solved):
                stats.elapsed = time.monotonic() - start
                return SearchResult(FOUND, node.script + (pred.tactic,), stats)
            if isinstance(outcome, Progress):
                child = _Node(
                    outcome.stack,
                    node.rank_path + (rank,),
                    node.cost + 1 + rank,
                    node.script + (pred.tactic,),
                )
                heapq.heappush(
                    heap,
                    (child.cost, len(child.rank_path), child.rank_path, child),
                )
    stats.elapsed = time.monotonic() - start
    return SearchResult(EXHAUSTED, None, stats)


def replay(
    env: ProofEnv, root_stack: GoalStack, script: tuple[str, ...]
) -> ProofOutcome:
    """Apply a flat tactic script in order; used to validate Found results."""
    stack = root_stack
    for tactic in script:
        outcome = apply_tactic(env, stack, tactic)
        if isinstance(outcome, Solved):
            return outcome
        if isinstance(outcome, Failure):
            return outcome
        stack = outcome.stack
    return Progress(stack)
