"""Finite binary relations over small named carriers.

A relation is an immutable set of index pairs tied to a ``StateSpace``.  The
operations cover both the angelic reading of non-determinism (plain
composition and union) and the demonic one (demonic composition, demonic
join, demonic refinement), plus the partial constellation product whose
undefinedness is an ordinary result value rather than an exception.

Demonic composition is computed in two independent ways and the results are
compared whenever self-checking is enabled:

* the quantifier form: (x,y) is in s*t iff some z has (x,z) in s and
  (z,y) in t, and every w with (x,w) in s has an outgoing t-pair;
* the algebraic form: (s;t) restricted to those x with s(x) inside dom(t).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from . import config


class SpaceMismatchError(ValueError):
    """Raised when an operation mixes relations over different spaces."""


class _UndefinedType:
    """Result of a partial operation applied outside its domain."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Undefined"


UNDEFINED = _UndefinedType()


# ---------------------------------------------------------------------------
# state spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateSpace:
    """An ordered carrier of named states, optionally with a fail state.

    The fail state models non-termination: program-shaped relations keep its
    row fixed to the single pair (fail, fail).
    """

    names: tuple[str, ...]
    fail_index: Optional[int] = None

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate state names: {self.names}")
        if not self.names:
            raise ValueError("empty state space")
        if self.fail_index is not None and not 0 <= self.fail_index < len(self.names):
            raise ValueError(f"fail index {self.fail_index} out of range")

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def has_fail(self) -> bool:
        return self.fail_index is not None

    @property
    def fail_name(self) -> str:
        if self.fail_index is None:
            raise ValueError("space has no fail state")
        return self.names[self.fail_index]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r} (carrier {list(self.names)})") from None

    def proper_indices(self) -> tuple[int, ...]:
        """Indices of the non-fail states."""
        return tuple(i for i in range(self.size) if i != self.fail_index)

    def extend_by_fail(self, fail_name: str = "0") -> "StateSpace":
        """Adjoin a fresh fail state (appended last)."""
        if self.has_fail:
            raise ValueError("space already has a fail state")
        if fail_name in self.names:
            raise ValueError(f"fail name {fail_name!r} collides with a state name")
        return StateSpace(self.names + (fail_name,), len(self.names))

    def drop_fail(self) -> "StateSpace":
        """The space of proper states only."""
        if not self.has_fail:
            raise ValueError("space has no fail state")
        return StateSpace(tuple(self.names[i] for i in self.proper_indices()), None)

    def __repr__(self):
        fail = f" fail {self.fail_name}" if self.has_fail else ""
        return f"StateSpace({{{','.join(self.names)}}}{fail})"


def make_space(names: Iterable[str], fail_name: Optional[str] = None) -> StateSpace:
    """Build a space from proper-state names, adjoining fail_name if given."""
    sp = StateSpace(tuple(names), None)
    if fail_name is not None:
        sp = sp.extend_by_fail(fail_name)
    return sp


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------

class Relation:
    """An immutable binary relation over a StateSpace."""

    __slots__ = ("space", "pairs")

    def __init__(self, space: StateSpace, pairs: Iterable[tuple[int, int]]):
        pairs = frozenset(pairs)
        n = space.size
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"pair ({x},{y}) outside carrier of size {n}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "pairs", pairs)

    def __setattr__(self, name, value):
        raise AttributeError("Relation is immutable")

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.space == other.space and self.pairs == other.pairs

    def __hash__(self):
        return hash((self.space, self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return pair in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __str__(self):
        names = self.space.names
        fail = self.space.fail_index

        def key(pair):
            x, y = pair
            # fail row prints last so program relations read naturally
            return (x == fail, x, y == fail, y)

        body = ",".join(f"({names[x]},{names[y]})" for x, y in sorted(self.pairs, key=key))
        return "{" + body + "}"

    def __repr__(self):
        return f"Relation{self}"

    # -- basics -----------------------------------------------------------

    def _require_same_space(self, other: "Relation") -> None:
        if self.space != other.space:
            raise SpaceMismatchError(f"operands live on different spaces: "
                                     f"{self.space!r} vs {other.space!r}")

    def dom(self) -> frozenset[int]:
        return frozenset(x for x, _ in self.pairs)

    def ran(self) -> frozenset[int]:
        return frozenset(y for _, y in self.pairs)

    def image(self, x: int) -> frozenset[int]:
        return frozenset(y for x2, y in self.pairs if x2 == x)

    def restrict_domain(self, xs: Iterable[int]) -> "Relation":
        xs = frozenset(xs)
        return Relation(self.space, ((x, y) for x, y in self.pairs if x in xs))

    def domain_diagonal(self) -> "Relation":
        """D(s): the identity restricted to dom(s)."""
        return Relation(self.space, ((x, x) for x in self.dom()))

    def union(self, other: "Relation") -> "Relation":
        self._require_same_space(other)
        return Relation(self.space, self.pairs | other.pairs)

    def intersection(self, other: "Relation") -> "Relation":
        self._require_same_space(other)
        return Relation(self.space, self.pairs & other.pairs)

    def includes(self, other: "Relation") -> bool:
        """other as a subset of self."""
        self._require_same_space(other)
        return other.pairs <= self.pairs

    def converse(self) -> "Relation":
        return Relation(self.space, ((y, x) for x, y in self.pairs))

    # -- compositions -----------------------------------------------------

    def compose(self, other: "Relation") -> "Relation":
        """Angelic sequential composition s;t."""
        self._require_same_space(other)
        succ: dict[int, set[int]] = {}
        for z, y in other.pairs:
            succ.setdefault(z, set()).add(y)
        out = set()
        for x, z in self.pairs:
            for y in succ.get(z, ()):
                out.add((x, y))
        return Relation(self.space, out)

    def compose_demonic(self, other: "Relation") -> "Relation":
        """Demonic sequential composition s*t.

        A start state only survives when every angelic branch of s from it
        can be continued through t.
        """
        self._require_same_space(other)
        dom_t = other.dom()
        safe = frozenset(x for x in self.dom() if self.image(x) <= dom_t)
        result = self.compose(other).restrict_domain(safe)
        if config.self_check_enabled():
            alt = self._compose_demonic_pointwise(other)
            assert result == alt, (
                f"demonic composition mismatch: {result} vs {alt}")
        return result

    def _compose_demonic_pointwise(self, other: "Relation") -> "Relation":
        # literal two-quantifier form, kept as a cross-check
        out = set()
        for x, z in self.pairs:
            for z2, y in other.pairs:
                if z != z2:
                    continue
                if all(any(w == v_src for v_src, _ in other.pairs)
                       for x2, w in self.pairs if x2 == x):
                    out.add((x, y))
        return Relation(self.space, out)

    def constellation(self, other: "Relation"):
        """Partial composition: s;t when ran(s) is inside dom(t), else UNDEFINED."""
        self._require_same_space(other)
        if not self.ran() <= other.dom():
            return UNDEFINED
        return self.compose(other)

    # -- demonic order and join ------------------------------------------

    def refines_demonic(self, other: "Relation") -> bool:
        """s refined by other: other may fail less and is otherwise a subset.

        Holds iff dom(other) is inside dom(s) and s agrees with a subset of
        other on dom(other).
        """
        self._require_same_space(other)
        dom_t = other.dom()
        return dom_t <= self.dom() and self.restrict_domain(dom_t).pairs <= other.pairs

    def join_demonic(self, other: "Relation") -> "Relation":
        """Demonic choice: union restricted to the common domain."""
        self._require_same_space(other)
        both = self.dom() & other.dom()
        return Relation(self.space, ((x, y) for x, y in self.pairs | other.pairs
                                     if x in both))

    # -- classification ---------------------------------------------------

    @property
    def is_left_total(self) -> bool:
        return self.dom() == frozenset(range(self.space.size))

    @property
    def is_total(self) -> bool:
        every = frozenset(range(self.space.size))
        return self.dom() == every and self.ran() == every

    def is_program_relation(self) -> bool:
        """Left total with the fail row fixed to (fail, fail)."""
        f = self.space.fail_index
        if f is None:
            raise ValueError("space has no fail state")
        if not self.is_left_total:
            return False
        return self.image(f) == frozenset({f})

    def classify(self) -> dict[str, bool]:
        out = {"is_left_total": self.is_left_total, "is_total": self.is_total}
        if self.space.has_fail:
            out["is_program_relation"] = self.is_program_relation()
        return out


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def empty(space: StateSpace) -> Relation:
    return Relation(space, ())


def diagonal(space: StateSpace) -> Relation:
    return Relation(space, ((x, x) for x in range(space.size)))


def full(space: StateSpace) -> Relation:
    n = space.size
    return Relation(space, ((x, y) for x in range(n) for y in range(n)))


def fail_all(space: StateSpace) -> Relation:
    """Every state mapped to fail only: the always-failing program."""
    f = space.fail_index
    if f is None:
        raise ValueError("space has no fail state")
    return Relation(space, ((x, f) for x in range(space.size)))


# ---------------------------------------------------------------------------
# enumeration (canonical order: ascending bitmask, bit (x,y) at x*n+y)
# ---------------------------------------------------------------------------

def mask_of(rel: Relation) -> int:
    n = rel.space.size
    m = 0
    for x, y in rel.pairs:
        m |= 1 << (x * n + y)
    return m


def from_mask(space: StateSpace, mask: int) -> Relation:
    n = space.size
    pairs = [(x, y) for x in range(n) for y in range(n) if mask >> (x * n + y) & 1]
    return Relation(space, pairs)


def all_relations(space: StateSpace) -> Iterator[Relation]:
    n = space.size
    for mask in range(1 << (n * n)):
        yield from_mask(space, mask)


def left_total_relations(space: StateSpace) -> Iterator[Relation]:
    n = space.size
    rows = [r for r in range(1, 1 << n)]
    for choice in itertools.product(rows, repeat=n):
        mask = sum(r << (x * n) for x, r in enumerate(choice))
        yield from_mask(space, mask)


def total_relations(space: StateSpace) -> Iterator[Relation]:
    for rel in left_total_relations(space):
        if rel.is_total:
            yield rel


def program_relations(space: StateSpace) -> Iterator[Relation]:
    """Left-total relations whose fail row is exactly (fail, fail)."""
    f = space.fail_index
    if f is None:
        raise ValueError("space has no fail state")
    n = space.size
    rows = [r for r in range(1, 1 << n)]
    fixed = {f: 1 << f}
    proper = space.proper_indices()
    for choice in itertools.product(rows, repeat=len(proper)):
        mask = fixed[f] << (f * n)
        for x, r in zip(proper, choice):
            mask += r << (x * n)
        yield from_mask(space, mask)
