"""Pluggable proof environments and script execution.

Two desk-scale kernels stand in for a real tactic engine: RuleKernel
rewrites the focused goal by root-label pattern rules; ReplayKernel
follows tactic-labeled edges of a trace forest recorded from earlier
runs.  Both are immutable after construction.

Goal-stack discipline: tactics apply to the first (focused) goal and new
subgoals are prepended.  ``a; b`` applies b to every goal produced by a;
``a; [b1 | ... | bn]`` requires a to produce exactly n goals and applies
bi to goal i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol

from tacticforge.db import normalize_tactic
from tacticforge.script import Atom, Recorded, ScriptAst, Then, ThenDispatch, print_script
from tacticforge.terms import ProofState, Term, parse_term, print_term

UNKNOWN_TACTIC = "unknown-tactic"
NO_MATCH = "no-match"
DISPATCH_ARITY = "dispatch-arity"
NO_PROGRESS = "no-progress"
NO_TRACE = "no-trace"

GoalStack = tuple[ProofState, ...]


class Solved:
    def __repr__(self) -> str:
        return "Solved"


@dataclass(frozen=True)
class Progress:
    stack: GoalStack


@dataclass(frozen=True)
class Failure:
    reason: str
    detail: str = ""


ProofOutcome = Solved | Progress | Failure

SOLVED = Solved()

Recorder = Callable[[ProofState, str], None]
Tracer = Callable[[ProofState, str, tuple[ProofState, ...]], None]


class _TacticFailed(Exception):
    def __init__(self, reason: str, detail: str = "") -> None:
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


class ProofEnv(Protocol):
    def apply_to_state(
        self, state: ProofState, tactic: str
    ) -> tuple[ProofState, ...]:
        """Subgoal states produced by the tactic, or raise _TacticFailed."""


def state_key(state: ProofState) -> str:
    hyps = ",".join(print_term(h) for h in state.hypotheses)
    return f"[{hyps}]|-{print_term(state.goal)}"


def stack_key(stack: GoalStack) -> str:
    return ";;".join(state_key(s) for s in stack)


@dataclass(frozen=True)
class Rule:
    tactic: str
    match_root: str
    subgoal_templates: tuple[Term, ...]


class RuleKernel:
    """Deterministic pattern-rewrite kernel.

    A rule matches when the focused goal's root label equals
    ``match_root``; each subgoal template is instantiated by substituting
    ``$i`` leaves with the goal's i-th child.  v1 states carry no
    hypotheses.
    """

    def __init__(self, rules: Iterable[Rule]) -> None:
        self.rules: dict[str, Rule] = {}
        for rule in rules:
            name = normalize_tactic(rule.tactic)
            if name in self.rules:
                raise ValueError(f"duplicate rule for tactic {name!r}")
            self.rules[name] = rule

    @classmethod
    def from_json(cls, source) -> "RuleKernel":
        """Build from a JSON list of {tactic, match_root, subgoal_templates}."""
        if isinstance(source, str):
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            data = source
        rules = [
            Rule(
                entry["tactic"],
                entry["match_root"],
                tuple(parse_term(t) for t in entry["subgoal_templates"]),
            )
            for entry in data
        ]
        return cls(rules)

    def apply_to_state(
        self, state: ProofState, tactic: str
    ) -> tuple[ProofState, ...]:
        rule = self.rules.get(normalize_tactic(tactic))
        if rule is None:
            raise _TacticFailed(UNKNOWN_TACTIC, tactic)
        goal = state.goal
        if goal.label != rule.match_root:
            raise _TacticFailed(NO_MATCH, f"{tactic} on {print_term(goal)}")
        subgoals = []
        for template in rule.subgoal_templates:
            term = _substitute(template, goal.children)
            subgoals.append(ProofState((), term))
        return tuple(subgoals)


def _substitute(template: Term, children: tuple[Term, ...]) -> Term:
    if not template.children and template.label.startswith("$"):
        idx = int(template.label[1:])
        if idx >= len(children):
            raise _TacticFailed(NO_MATCH, f"placeholder ${idx} out of range")
        return children[idx]
    return Term(
        template.label,
        tuple(_substitute(c, children) for c in template.children),
    )


class ReplayKernel:
    """Trace-forest kernel: follows recorded (state, tactic) -> subgoals edges.

    Unknown edges fail; explicit distractor edges fail too, modelling
    tactics that were tried and did not apply.
    """

    def __init__(
        self,
        traces: Iterable[tuple[ProofState, str, tuple[ProofState, ...]]],
        distractors: Iterable[tuple[ProofState, str]] = (),
    ) -> None:
        self._edges: dict[tuple[str, str], tuple[ProofState, ...]] = {}
        for state, tactic, children in traces:
            key = (state_key(state), normalize_tactic(tactic))
            self._edges[key] = tuple(children)
        self._distractors = {
            (state_key(s), normalize_tactic(t)) for s, t in distractors
        }

    def apply_to_state(
        self, state: ProofState, tactic: str
    ) -> tuple[ProofState, ...]:
        key = (state_key(state), normalize_tactic(tactic))
        if key in self._distractors:
            raise _TacticFailed(NO_MATCH, tactic)
        children = self._edges.get(key)
        if children is None:
            raise _TacticFailed(NO_TRACE, tactic)
        return children


def apply_tactic(env: ProofEnv, stack: GoalStack, tactic: str) -> ProofOutcome:
    """Apply a tactic to the focused goal; Solved / Progress / Failure."""
    if not stack:
        raise ValueError("cannot apply a tactic to an empty goal stack")
    try:
        subgoals = env.apply_to_state(stack[0], tactic)
    except _TacticFailed as exc:
        return Failure(exc.reason, exc.detail)
    new_stack = subgoals + stack[1:]
    if not new_stack:
        return SOLVED
    if new_stack == stack:
        return Failure(NO_PROGRESS, tactic)
    return Progress(new_stack)


def run_script(
    env: ProofEnv,
    stack: GoalStack,
    ast: ScriptAst,
    recorder: Recorder | None = None,
    tracer: Tracer | None = None,
) -> ProofOutcome:
    """Execute a script AST on a goal stack.

    Recorded nodes invoke ``recorder`` with the focused state and the
    inner tactic's text before execution.  ``tracer`` observes every
    successful atom application with its produced subgoals (used to
    build ReplayKernels).
    """
    if not stack:
        raise ValueError("cannot run a script on an empty goal stack")
    if isinstance(ast, Recorded):
        if recorder is not None:
            recorder(stack[0], print_script(ast.inner))
        return run_script(env, stack, ast.inner, recorder, tracer)
    if isinstance(ast, Atom):
        outcome = apply_tactic(env, stack, ast.text)
        if tracer is not None and not isinstance(outcome, Failure):
            produced = () if isinstance(outcome, Solved) else outcome.stack[
                : len(outcome.stack) - (len(stack) - 1)
            ]
            tracer(stack[0], ast.text, produced)
        return outcome
    if isinstance(ast, Then):
        return _run_compound(env, stack, ast.left, None, ast.right, recorder, tracer)
    if isinstance(ast, ThenDispatch):
        return _run_compound(env, stack, ast.left, ast.branches, None, recorder, tracer)
    raise TypeError(f"not a script node: {ast!r}")


def _run_compound(
    env: ProofEnv,
    stack: GoalStack,
    left: ScriptAst,
    branches: tuple[ScriptAst, ...] | None,
    right: ScriptAst | None,
    recorder: Recorder | None,
    tracer: Tracer | None,
) -> ProofOutcome:
    rest = stack[1:]
    outcome = run_script(env, stack, left, recorder, tracer)
    if isinstance(outcome, Failure):
        return outcome
    if isinstance(outcome, Solved):
        produced: tuple[ProofState, ...] = ()
    else:
        # goals beyond the untouched remainder are the ones left produced
        produced = outcome.stack[: len(outcome.stack) - len(rest)]
    if branches is not None and len(branches) != len(produced):
        return Failure(
            DISPATCH_ARITY,
            f"{len(branches)} branches for {len(produced)} goals",
        )
    result_goals: list[ProofState] = []
    for i, goal in enumerate(produced):
        cont = branches[i] if branches is not None else right
        sub = run_script(env, (goal,), cont, recorder, tracer)
        if isinstance(sub, Failure):
            return sub
        if isinstance(sub, Progress):
            result_goals.extend(sub.stack)
    new_stack = tuple(result_goals) + rest
    if not new_stack:
        return SOLVED
    return Progress(new_stack)
