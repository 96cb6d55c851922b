"""Hoare triples over the program model.

Tests are predicates on proper states, modelled as programs that pass
matching states through and fail the rest.  Partial and total correctness
each have three equivalent characterizations (definitional, algebraic on
programs, algebraic on restrictions); all are computed and compared, and a
disagreement raises rather than silently picking one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional

from .programs import Program, abort, skip
from .relations import UNDEFINED, Relation, StateSpace


class InternalCheckError(RuntimeError):
    """Characterizations that must agree did not; an implementation bug."""


class ProgramSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


# ---------------------------------------------------------------------------
# program syntax
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Abort:
    pass


@dataclass(frozen=True)
class Seq:
    left: object
    right: object


@dataclass(frozen=True)
class Choice:
    left: object
    right: object


_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_]\w*)|(?P<punct>[;|()]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ProgramSyntaxError(f"unexpected character {text[bad]!r}", bad)
            break
        kind = "ident" if m.group("ident") else "punct"
        value = m.group(kind)
        tokens.append((kind, value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_program(text: str, env: Mapping[str, Program]):
    """Parse the program DSL; ';' binds tighter than '|', both left-assoc."""
    tokens = _tokenize(text)
    index = 0

    def peek():
        return tokens[index]

    def advance():
        nonlocal index
        tok = tokens[index]
        index += 1
        return tok

    def parse_atom():
        kind, value, offset = peek()
        if kind == "ident":
            advance()
            if value == "skip":
                return Skip()
            if value == "abort":
                return Abort()
            if value not in env:
                raise ProgramSyntaxError(f"unknown atom {value!r}", offset)
            return Atom(value)
        if kind == "punct" and value == "(":
            advance()
            node = parse_choice()
            kind, value, offset = peek()
            if value != ")":
                raise ProgramSyntaxError("expected ')'", offset)
            advance()
            return node
        raise ProgramSyntaxError("expected program", offset)

    def parse_seq():
        node = parse_atom()
        while peek()[1] == ";":
            advance()
            node = Seq(node, parse_atom())
        return node

    def parse_choice():
        node = parse_seq()
        while peek()[1] == "|":
            advance()
            node = Choice(node, parse_seq())
        return node

    node = parse_choice()
    kind, value, offset = peek()
    if kind != "end":
        raise ProgramSyntaxError(f"unexpected {value!r}", offset)
    return node


def denote(node, env: Mapping[str, Program],
           space: Optional[StateSpace] = None) -> Program:
    """Evaluate an AST to a program; space may be inferred from env."""
    if space is None:
        try:
            space = next(iter(env.values())).space
        except StopIteration:
            raise ValueError("cannot infer state space from an empty environment")
    match node:
        case Atom(name):
            try:
                return env[name]
            except KeyError:
                raise ValueError(f"unbound atom {name!r}") from None
        case Skip():
            return skip(space)
        case Abort():
            return abort(space)
        case Seq(left, right):
            return denote(left, env, space).seq(denote(right, env, space))
        case Choice(left, right):
            return denote(left, env, space).choice(denote(right, env, space))
    raise TypeError(f"not a program AST node: {node!r}")


# ---------------------------------------------------------------------------
# tests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Test:
    """A predicate on proper states of a fail-carrying space."""

    space: StateSpace
    truth: frozenset[int]

    def __post_init__(self):
        if not self.space.has_fail:
            raise ValueError("tests live on spaces with a fail state")
        object.__setattr__(self, "truth", frozenset(self.truth))
        proper = set(self.space.proper_indices())
        if not self.truth <= proper:
            raise ValueError(f"truth set {set(self.truth)} not within proper states")

    def __str__(self):
        names = self.space.names
        return "{" + ",".join(names[i] for i in sorted(self.truth)) + "}"

    def diagonal_part(self) -> Relation:
        """The restriction of the identity to the truth set, over X."""
        inner = self.space.drop_fail()
        order = {old: new for new, old in enumerate(self.space.proper_indices())}
        return Relation(inner, ((order[i], order[i]) for i in self.truth))


def test_to_program(t: Test) -> Program:
    """Pass matching states through, fail everything else."""
    f = t.space.fail_index
    pairs = {(i, i) for i in t.truth}
    pairs.update((x, f) for x in range(t.space.size) if x not in t.truth)
    return Program(Relation(t.space, pairs))


def test_leq(a: Test, b: Test) -> bool:
    """Truth-set inclusion, cross-checked against both algebraic forms."""
    if a.space != b.space:
        raise ValueError("tests on different spaces")
    result = a.truth <= b.truth
    da, db = a.diagonal_part(), b.diagonal_part()
    if (da.compose(db) == da) != result:
        raise InternalCheckError("test order: diagonal form disagrees")
    pa, pb = test_to_program(a), test_to_program(b)
    if (pa.seq(pb) == pa) is not result:
        raise InternalCheckError("test order: program form disagrees")
    return result


def parse_test(space: StateSpace, text: str) -> Test:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"test literal must be braced: {text!r}")
    names = [s.strip() for s in text[1:-1].split(",") if s.strip()]
    return Test(space, frozenset(space.index(n) for n in names))


# ---------------------------------------------------------------------------
# triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HoareTriple:
    pre: Test
    prog: object
    post: Test

    def __post_init__(self):
        if self.pre.space != self.post.space:
            raise ValueError("pre and post tests on different spaces")


def _resolve(prog, env, space) -> Program:
    if isinstance(prog, Program):
        return prog
    return denote(prog, env or {}, space)


def partially_correct(triple: HoareTriple, env: Mapping[str, Program] = None) -> bool:
    """True when every terminating run from pre lands in post.

    Computes the definitional, program-algebraic and restriction-algebraic
    forms and insists they agree.
    """
    e, f = triple.pre, triple.post
    p = _resolve(triple.prog, env, e.space)
    if p.space != e.space:
        raise ValueError("program and tests on different spaces")
    fail = e.space.fail_index

    by_definition = all(y in f.truth for x, y in p.rel.pairs
                        if x in e.truth and y != fail)

    ep, fp = test_to_program(e), test_to_program(f)
    by_programs = ep.seq(p).seq(fp) == ep.seq(p)

    ed, fd = e.diagonal_part(), f.diagonal_part()
    pa = p.angelic_part()
    by_parts = ed.compose(pa).compose(fd) == ed.compose(pa)

    if not by_definition == by_programs == by_parts:
        raise InternalCheckError(
            f"partial correctness characterizations disagree on ({e}){p}({f}): "
            f"definition={by_definition} programs={by_programs} parts={by_parts}")
    return by_definition


def totally_correct(triple: HoareTriple, env: Mapping[str, Program] = None) -> bool:
    """True when every run from pre terminates in post (three forms, checked)."""
    e, f = triple.pre, triple.post
    p = _resolve(triple.prog, env, e.space)
    if p.space != e.space:
        raise ValueError("program and tests on different spaces")
    fail = e.space.fail_index

    by_definition = all((x, fail) not in p.rel.pairs
                        and all(y in f.truth for y in p.rel.image(x) if y != fail)
                        for x in e.truth)

    ed, fd = e.diagonal_part(), f.diagonal_part()
    pd = p.demonic_part()
    chain = ed.compose_demonic(pd)
    guarded = chain.compose_demonic(fd) == chain
    dom_ok = ed.compose(pd.domain_diagonal()) == ed
    by_demonic = guarded and dom_ok

    first = ed.constellation(pd)
    if first is UNDEFINED:
        by_constellation = False
    else:
        by_constellation = first.constellation(fd) is not UNDEFINED

    if not by_definition == by_demonic == by_constellation:
        raise InternalCheckError(
            f"total correctness characterizations disagree on ({e}){p}({f}): "
            f"definition={by_definition} demonic={by_demonic} "
            f"constellation={by_constellation}")
    return by_definition


def _all_tests(space: StateSpace):
    proper = space.proper_indices()
    for mask in range(1 << len(proper)):
        yield Test(space, frozenset(proper[i] for i in range(len(proper))
                                    if mask >> i & 1))


def partially_refines(p: Program, q: Program, mode: str = "algebraic") -> bool:
    """p keeps every partial-correctness guarantee q makes.

    mode 'algebraic' uses inclusion of angelic parts, 'tests' quantifies
    over all test pairs, 'both' computes the two and insists they agree.
    """
    return _refines(p, q, mode, partially_correct)


def totally_refines(p: Program, q: Program, mode: str = "algebraic") -> bool:
    """Like partially_refines but for total correctness (demonic refinement)."""
    return _refines(p, q, mode, totally_correct)


def _refines(p: Program, q: Program, mode: str, correct) -> bool:
    if p.space != q.space:
        raise ValueError("programs on different spaces")
    if mode not in ("algebraic", "tests", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    algebraic = tests = None
    if mode in ("algebraic", "both"):
        if correct is partially_correct:
            algebraic = p.quasi_partial(q)
        else:
            algebraic = p.quasi_total(q)
    if mode in ("tests", "both"):
        tests = all(correct(HoareTriple(e, p, f))
                    for e in _all_tests(p.space)
                    for f in _all_tests(p.space)
                    if correct(HoareTriple(e, q, f)))
    if mode == "both" and algebraic != tests:
        raise InternalCheckError(
            f"refinement modes disagree for {p} vs {q}: "
            f"algebraic={algebraic} tests={tests}")
    return algebraic if algebraic is not None else tests


# ---------------------------------------------------------------------------
# triple file format: {pre} program {post}
# ---------------------------------------------------------------------------

_TRIPLE_RE = re.compile(r"^\s*(\{[^}]*\})\s*(.*?)\s*(\{[^}]*\})\s*$")


def parse_triple(line: str, space: StateSpace) -> tuple[Test, str, Test]:
    m = _TRIPLE_RE.match(line)
    if not m:
        raise ValueError(f"expected '{{pre}} program {{post}}', got {line!r}")
    return parse_test(space, m.group(1)), m.group(2), parse_test(space, m.group(3))
