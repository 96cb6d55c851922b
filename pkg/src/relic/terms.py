"""Terms and quasi-equations over the relation operations.

Grammar (infix, all operators left-associative at one precedence level;
mixing two operators without parentheses is a syntax error):

    formula := atoms | atoms '=>' atoms
    atoms   := atom ('&' atom)*
    atom    := 'ex' '(' term ')' | term ('=' | '<=' | 'ref<=') term
    term    := factor (OP factor)*          OP one of ; * cup dj .
    factor  := NAME | CONST | '(' term ')'
    CONST   := 0e | 1' | nabla | Z          empty, identity, full, all-fail

`<=` is inclusion, `ref<=` demonic refinement; `cup` is union and `dj`
demonic join.  A formula without `=>` is a plain conjunction of equations
or inclusions (empty antecedent).  Atoms over an undefined `.`-subterm are
false rather than errors: existence is part of the claim.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .relations import (
    Relation,
    StateSpace,
    UNDEFINED,
    diagonal,
    empty,
    fail_all,
    full,
)


class FormulaError(ValueError):
    """Syntax or scoping problem in a formula; carries a position."""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    kind: str  # empty | identity | full | fail


@dataclass(frozen=True)
class Op:
    sym: str  # ; * | || .
    left: "Term"
    right: "Term"


Term = Union[Var, Const, Op]


@dataclass(frozen=True)
class Atom:
    kind: str  # = | <= | [= | ex
    left: Term
    right: Optional[Term] = None


@dataclass(frozen=True)
class Formula:
    antecedent: tuple[Atom, ...]
    consequent: tuple[Atom, ...]

    def variables(self) -> tuple[str, ...]:
        """Variable names in first-occurrence order."""
        seen: list[str] = []

        def walk(t):
            if isinstance(t, Var):
                if t.name not in seen:
                    seen.append(t.name)
            elif isinstance(t, Op):
                walk(t.left)
                walk(t.right)

        for atom in self.antecedent + self.consequent:
            walk(atom.left)
            if atom.right is not None:
                walk(atom.right)
        return tuple(seen)

    def __str__(self):
        cons = " & ".join(map(_format_atom, self.consequent))
        if not self.antecedent:
            return cons
        ants = " & ".join(map(_format_atom, self.antecedent))
        return f"{ants} => {cons}"


# token spellings for operators and constants
_OP_TOKENS = {";": ";", "*": "*", "cup": "|", "dj": "||", ".": "."}
_OP_SPELLING = {v: k for k, v in _OP_TOKENS.items()}
_CONST_TOKENS = {"0e": "empty", "1'": "identity", "nabla": "full", "Z": "fail"}
_CONST_SPELLING = {v: k for k, v in _CONST_TOKENS.items()}
_ATOM_SPELLING = {"=": "=", "<=": "<=", "[=": "ref<="}


def _format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return _CONST_SPELLING[t.kind]
    return f"({_format_term(t.left)} {_OP_SPELLING[t.sym]} {_format_term(t.right)})"


def _format_atom(a: Atom) -> str:
    if a.kind == "ex":
        return f"ex({_format_term(a.left)})"
    return f"{_format_term(a.left)} {_ATOM_SPELLING[a.kind]} {_format_term(a.right)}"


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<refle>ref<=)"
    r"|(?P<imp>=>)"
    r"|(?P<le><=)"
    r"|(?P<ident>1')"
    r"|(?P<emptyc>0e)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>[();*.&=])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaError(f"char {pos}: unexpected character {text[pos]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        value = m.group()
        if kind == "refle":
            out.append(("relop", "ref<=", m.start()))
        elif kind == "imp":
            out.append(("imp", "=>", m.start()))
        elif kind == "le":
            out.append(("relop", "<=", m.start()))
        elif kind in ("ident", "emptyc"):
            out.append(("const", value, m.start()))
        elif kind == "name":
            if value in ("cup", "dj"):
                out.append(("op", value, m.start()))
            elif value == "ex":
                out.append(("ex", value, m.start()))
            elif value in ("nabla", "Z"):
                out.append(("const", value, m.start()))
            else:
                out.append(("var", value, m.start()))
        else:
            if value in ";*.":
                out.append(("op", value, m.start()))
            elif value == "=":
                out.append(("relop", "=", m.start()))
            else:
                out.append((value, value, m.start()))
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise FormulaError(
                f"char {tok[2]}: expected {kind}, got {tok[1]!r}"
                if tok[0] != "end" else f"char {tok[2]}: unexpected end of input")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        first = self.atoms()
        if self.peek()[0] == "imp":
            self.take()
            second = self.atoms()
            out = Formula(tuple(first), tuple(second))
        else:
            out = Formula((), tuple(first))
        tok = self.peek()
        if tok[0] != "end":
            raise FormulaError(f"char {tok[2]}: trailing input {tok[1]!r}")
        return out

    def atoms(self) -> list[Atom]:
        out = [self.atom()]
        while self.peek()[0] == "&":
            self.take()
            out.append(self.atom())
        return out

    def atom(self) -> Atom:
        if self.peek()[0] == "ex":
            self.take()
            self.take("(")
            t = self.term()
            self.take(")")
            return Atom("ex", t)
        left = self.term()
        kind_tok = self.take("relop")
        right = self.term()
        kind = "[=" if kind_tok[1] == "ref<=" else kind_tok[1]
        return Atom(kind, left, right)

    def term(self) -> Term:
        t = self.factor()
        level_op = None
        while self.peek()[0] == "op":
            tok = self.take()
            sym = _OP_TOKENS[tok[1]]
            if level_op is None:
                level_op = sym
            elif sym != level_op:
                raise FormulaError(
                    f"char {tok[2]}: parentheses required when mixing "
                    f"{_OP_SPELLING[level_op]!r} and {tok[1]!r}")
            t = Op(sym, t, self.factor())
        return t

    def factor(self) -> Term:
        tok = self.peek()
        if tok[0] == "(":
            self.take()
            t = self.term()
            self.take(")")
            return t
        if tok[0] == "const":
            self.take()
            return Const(_CONST_TOKENS[tok[1]])
        if tok[0] == "var":
            self.take()
            return Var(tok[1])
        raise FormulaError(f"char {tok[2]}: expected a term, got {tok[1]!r}")


def parse_formula(text: str) -> Formula:
    return _Parser(text).formula()


def parse_term(text: str) -> Term:
    """A bare term, mostly for interactive evaluation."""
    p = _Parser(text)
    t = p.term()
    tok = p.peek()
    if tok[0] != "end":
        raise FormulaError(f"char {tok[2]}: trailing input {tok[1]!r}")
    return t


# -- evaluation over concrete relations -------------------------------------

_CONST_BUILDERS = {
    "empty": empty,
    "identity": diagonal,
    "full": full,
}


def _const_relation(kind: str, space: StateSpace) -> Relation:
    if kind == "fail":
        if not space.has_fail:
            raise ValueError(
                "constant Z (all-fail) needs a fail state; use the LTREL0 domain")
        return fail_all(space)
    return _CONST_BUILDERS[kind](space)


def eval_term(term: Term, assignment: dict[str, Relation],
              space: Optional[StateSpace] = None):
    """Evaluate to a Relation, or UNDEFINED (strictly propagated)."""
    if space is None:
        if not assignment:
            raise ValueError("constant-only term needs an explicit space")
        space = next(iter(assignment.values())).space
    if isinstance(term, Var):
        try:
            return assignment[term.name]
        except KeyError:
            raise ValueError(f"unassigned variable {term.name!r}") from None
    if isinstance(term, Const):
        return _const_relation(term.kind, space)
    a = eval_term(term.left, assignment, space)
    if a is UNDEFINED:
        return UNDEFINED
    b = eval_term(term.right, assignment, space)
    if b is UNDEFINED:
        return UNDEFINED
    if term.sym == ";":
        return a.compose(b)
    if term.sym == "*":
        return a.compose_demonic(b)
    if term.sym == "|":
        return a.union(b)
    if term.sym == "||":
        return a.join_demonic(b)
    return a.constellation(b)


def eval_atom(atom: Atom, assignment: dict[str, Relation],
              space: Optional[StateSpace] = None) -> bool:
    left = eval_term(atom.left, assignment, space)
    if atom.kind == "ex":
        return left is not UNDEFINED
    right = eval_term(atom.right, assignment, space)
    if left is UNDEFINED or right is UNDEFINED:
        return False
    if atom.kind == "=":
        return left == right
    if atom.kind == "<=":
        return right.includes(left)
    return left.refines_demonic(right)


def eval_formula(formula: Formula, assignment: dict[str, Relation],
                 space: Optional[StateSpace] = None) -> bool:
    """True when the instance holds (antecedent fails or consequent holds)."""
    if not all(eval_atom(a, assignment, space) for a in formula.antecedent):
        return True
    return all(eval_atom(a, assignment, space) for a in formula.consequent)
