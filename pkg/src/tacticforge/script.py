"""Miniature tactic-script language: parsing and recording instrumentation.

Grammar: atoms separated by ``;`` (left-associative), where a ``[ e |
... | e ]`` dispatch group may only appear immediately after a ``;``.
Everything else, including richer constructs like ``repeat split``,
stays inside atom text and is treated as a single tactic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

ScriptAst = Union["Atom", "Then", "ThenDispatch", "Recorded"]


class ParseError(ValueError):
    def __init__(self, message: str, pos: int) -> None:
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class AlreadyInstrumented(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    text: str


@dataclass(frozen=True)
class Then:
    left: ScriptAst
    right: ScriptAst


@dataclass(frozen=True)
class ThenDispatch:
    left: ScriptAst
    branches: tuple[ScriptAst, ...]


@dataclass(frozen=True)
class Recorded:
    inner: ScriptAst


def parse_script(text: str) -> ScriptAst:
    ast, pos = _parse_seq(text, 0, top=True)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ParseError(f"unexpected {text[pos]!r}", pos)
    return ast


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_atom(text: str, pos: int) -> tuple[Atom, int]:
    start = _skip_ws(text, pos)
    end = start
    while end < len(text) and text[end] not in ";[]|":
        end += 1
    atom_text = " ".join(text[start:end].split())
    if not atom_text:
        raise ParseError("empty tactic expression", start)
    return Atom(atom_text), end


def _parse_dispatch(text: str, pos: int) -> tuple[tuple[ScriptAst, ...], int]:
    # pos points at '['
    open_pos = pos
    pos += 1
    branches: list[ScriptAst] = []
    while True:
        branch, pos = _parse_seq(text, pos, top=False)
        branches.append(branch)
        pos = _skip_ws(text, pos)
        if pos >= len(text):
            raise ParseError("unbalanced '['", open_pos)
        if text[pos] == "|":
            pos += 1
            continue
        if text[pos] == "]":
            return tuple(branches), pos + 1
        raise ParseError(f"unexpected {text[pos]!r} in dispatch", pos)


def _parse_seq(text: str, pos: int, top: bool) -> tuple[ScriptAst, int]:
    pos = _skip_ws(text, pos)
    if pos < len(text) and text[pos] == "[":
        raise ParseError("dispatch group may only follow ';'", pos)
    node, pos = _parse_atom(text, pos)
    while True:
        pos = _skip_ws(text, pos)
        if pos >= len(text) or text[pos] != ";":
            return node, pos
        pos = _skip_ws(text, pos + 1)
        if pos < len(text) and text[pos] == "[":
            branches, pos = _parse_dispatch(text, pos)
            node = ThenDispatch(node, branches)
        else:
            right, pos = _parse_atom(text, pos)
            node = Then(node, right)


def print_script(ast: ScriptAst) -> str:
    if isinstance(ast, Atom):
        return ast.text
    if isinstance(ast, Recorded):
        return f"r {print_script(ast.inner)}"
    if isinstance(ast, Then):
        return f"{print_script(ast.left)}; {print_script(ast.right)}"
    if isinstance(ast, ThenDispatch):
        inner = " | ".join(print_script(b) for b in ast.branches)
        return f"{print_script(ast.left)}; [{inner}]"
    raise TypeError(f"not a script node: {ast!r}")


def _has_recorded(ast: ScriptAst) -> bool:
    if isinstance(ast, Recorded):
        return True
    if isinstance(ast, Then):
        return _has_recorded(ast.left) or _has_recorded(ast.right)
    if isinstance(ast, ThenDispatch):
        return _has_recorded(ast.left) or any(
            _has_recorded(b) for b in ast.branches
        )
    return False


def instrument(ast: ScriptAst) -> ScriptAst:
    """Wrap every atom in a Recorded node; structure otherwise unchanged."""
    if _has_recorded(ast):
        raise AlreadyInstrumented("script is already instrumented")
    return _instrument(ast)


def _instrument(ast: ScriptAst) -> ScriptAst:
    if isinstance(ast, Atom):
        return Recorded(ast)
    if isinstance(ast, Then):
        return Then(_instrument(ast.left), _instrument(ast.right))
    if isinstance(ast, ThenDispatch):
        return ThenDispatch(
            _instrument(ast.left), tuple(_instrument(b) for b in ast.branches)
        )
    raise TypeError(f"not a script node: {ast!r}")


def atoms(ast: ScriptAst) -> list[str]:
    """Atom texts in execution-source order."""
    if isinstance(ast, Atom):
        return [ast.text]
    if isinstance(ast, Recorded):
        return atoms(ast.inner)
    if isinstance(ast, Then):
        return atoms(ast.left) + atoms(ast.right)
    if isinstance(ast, ThenDispatch):
        out = atoms(ast.left)
        for b in ast.branches:
            out += atoms(b)
        return out
    raise TypeError(f"not a script node: {ast!r}")
