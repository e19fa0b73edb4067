"""Generate the demo rule kernel and script corpus under demo/.

Goals are random trees over a small propositional-style grammar; each
goal's script is derived from its structure, so every script solves its
lemma under demo/rules.json. Scripts contain at most five atoms.

Usage: python3 tools/make_demo_corpus.py [--seed N] [--outdir demo]
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

RULES = [
    {"tactic": "split", "match_root": "and", "subgoal_templates": ["$0", "$1"]},
    {"tactic": "left", "match_root": "or", "subgoal_templates": ["$0"]},
    {"tactic": "right", "match_root": "or", "subgoal_templates": ["$1"]},
    {"tactic": "intro", "match_root": "impl", "subgoal_templates": ["$1"]},
    {"tactic": "trivial", "match_root": "true", "subgoal_templates": []},
    {"tactic": "reflexivity", "match_root": "eq", "subgoal_templates": []},
]

ATOMS = ["x", "y", "z", "(f x)", "(g y)", "(f (g z))", "(h x y)"]
HYP_POOL = ["(p x)", "(q y)", "(r (f x))", "(s z)"]

# developments / files; later files depend on earlier ones so their
# searches can learn from already-recorded pairs
FILES = [
    ("basics/leaves.v", []),
    ("basics/pairs.v", ["basics/leaves.v"]),
    ("logic/disj.v", ["basics/leaves.v"]),
    ("logic/mixed.v", ["basics/pairs.v", "logic/disj.v"]),
    ("equality/chains.v", ["basics/leaves.v"]),
    ("equality/deep.v", ["equality/chains.v", "logic/mixed.v"]),
]


def leaf(rng: random.Random) -> tuple[str, str]:
    if rng.random() < 0.5:
        return "true", "trivial"
    t = rng.choice(ATOMS)
    return f"(eq {t} {t})", "reflexivity"


def gen(rng: random.Random, budget: int, shapes: list[str]) -> tuple[str, str, int]:
    """Return (goal text, script text, atoms used); atoms used <= budget."""
    if budget <= 1:
        goal, tac = leaf(rng)
        return goal, tac, 1
    shape = rng.choice(shapes)
    if shape == "leaf":
        goal, tac = leaf(rng)
        return goal, tac, 1
    if shape == "and":
        lg, ls, ln = gen(rng, (budget - 1) // 2, shapes)
        rg, rs, rn = gen(rng, budget - 1 - ln, shapes)
        return f"(and {lg} {rg})", f"split; [{ls} | {rs}]", 1 + ln + rn
    if shape == "or":
        pick, other = ("left", 0) if rng.random() < 0.5 else ("right", 1)
        sg, ss, sn = gen(rng, budget - 1, shapes)
        dead, _, _ = gen(rng, 2, ["leaf"])
        sides = [sg, dead] if other == 0 else [dead, sg]
        return f"(or {sides[0]} {sides[1]})", f"{pick}; {ss}", 1 + sn
    if shape == "impl":
        hyp = rng.choice(HYP_POOL)
        sg, ss, sn = gen(rng, budget - 1, shapes)
        return f"(impl {hyp} {sg})", f"intro; {ss}", 1 + sn
    raise AssertionError(shape)


def file_shapes(name: str) -> list[str]:
    if name.startswith("basics/leaves"):
        return ["leaf"]
    if name.startswith("basics/pairs"):
        return ["and", "leaf"]
    if name.startswith("logic/disj"):
        return ["or", "leaf"]
    if name.startswith("logic/mixed"):
        return ["and", "or", "impl", "leaf"]
    if name.startswith("equality"):
        return ["and", "impl", "leaf"]
    raise AssertionError(name)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--outdir", default="demo")
    parser.add_argument("--lemmas-per-file", type=int, default=10)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "rules.json").write_text(json.dumps(RULES, indent=2) + "\n")
    records = []
    for name, deps in FILES:
        records.append({"file": name, "deps": deps})
        shapes = file_shapes(name)
        for i in range(args.lemmas_per_file):
            budget = rng.choice([1, 2, 3, 3, 4, 4, 5, 5])
            goal, script, _ = gen(rng, budget, shapes)
            records.append(
                {
                    "file": name,
                    "lemma": f"{name.split('/')[-1].removesuffix('.v')}_{i}",
                    "goal": goal,
                    "script": script,
                }
            )
    with open(outdir / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    print(f"wrote {outdir}/rules.json and {outdir}/corpus.jsonl "
          f"({len(FILES) * args.lemmas_per_file} lemmas)")


if __name__ == "__main__":
    main()
