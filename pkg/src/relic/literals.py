"""Textual formats for spaces, relations and binding environments.

Grammar (whitespace-insensitive inside braces, # starts a comment):

    space     := 'space' NAME '=' '{' name (',' name)* '}' ['fail' name]
    relation  := '{' '}' | '{' pair (',' pair)* '}'
    pair      := '(' name ',' name ')'
    binding   := NAME '=' relation
    env file  := space binding*

The fail clause adjoins a fresh state to the listed carrier.
"""

from __future__ import annotations

import re

from .relations import Relation, StateSpace, make_space


class FormatError(ValueError):
    """Malformed space/relation/env text."""


_SPACE_RE = re.compile(
    r"^\s*space\s+(?P<name>\w+)\s*=\s*\{(?P<body>[^}]*)\}\s*(?:fail\s+(?P<fail>\S+))?\s*$")
# binding names follow state-name rules (any glue-free token), not \w+:
# adjoined elements like 1' must be bindable
_BINDING_RE = re.compile(r"^\s*(?P<name>[^\s=]+)\s*=\s*(?P<body>\{.*\})\s*$")
_PAIR_RE = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def parse_space(line: str) -> StateSpace:
    m = _SPACE_RE.match(line)
    if not m:
        raise FormatError(f"bad space declaration: {line!r}")
    names = [s.strip() for s in m.group("body").split(",") if s.strip()]
    if not names:
        raise FormatError(f"empty carrier in: {line!r}")
    try:
        return make_space(names, m.group("fail"))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def parse_relation(space: StateSpace, text: str) -> Relation:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise FormatError(f"relation literal must be braced: {text!r}")
    body = text[1:-1].strip()
    if not body:
        return Relation(space, ())
    pairs = []
    consumed = 0
    for m in _PAIR_RE.finditer(body):
        try:
            pairs.append((space.index(m.group(1)), space.index(m.group(2))))
        except KeyError as exc:
            raise FormatError(str(exc)) from None
        consumed += len(m.group(0))
    leftovers = _PAIR_RE.sub("", body).replace(",", "").strip()
    if leftovers:
        raise FormatError(f"unparsed text in relation literal: {leftovers!r}")
    return Relation(space, pairs)


def format_relation(rel: Relation) -> str:
    return str(rel)


def parse_env(text: str) -> tuple[StateSpace, dict[str, Relation]]:
    """Parse a space declaration followed by name = relation bindings."""
    space = None
    bindings: dict[str, Relation] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("space"):
            if space is not None:
                raise FormatError(f"line {lineno}: duplicate space declaration")
            space = parse_space(line)
            continue
        m = _BINDING_RE.match(line)
        if not m:
            raise FormatError(f"line {lineno}: expected binding, got {line!r}")
        if space is None:
            raise FormatError(f"line {lineno}: binding before space declaration")
        name = m.group("name")
        if name in bindings:
            raise FormatError(f"line {lineno}: duplicate binding for {name!r}")
        bindings[name] = parse_relation(space, m.group("body"))
    if space is None:
        raise FormatError("no space declaration found")
    return space, bindings
