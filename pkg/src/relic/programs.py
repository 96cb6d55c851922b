"""Programs as left-total relations over a state space with a fail state.

A program either moves a proper state to proper states or fails (maps it to
the fail state); the fail state itself only loops.  Left-totality makes the
model closed under sequencing (composition) and choice (union).

Two restrictions project a program onto plain relations over the proper
states: the angelic part keeps all proper transitions, the demonic part
additionally discards every state that can fail.  Together they determine
the program exactly, and three lifts go the other way:

* ``lift_angelic`` adds the option of failing everywhere (preserves the
  angelic part);
* ``lift_demonic`` completes each undefined state with a full chaos row
  (preserves the demonic part, lands on a program);
* ``lift_demonic_total`` does the same but also makes the fail row full,
  landing on a total relation instead of a program.
"""

from __future__ import annotations

from typing import Iterable

from . import config
from .relations import Relation, StateSpace, diagonal, fail_all


class Program:
    """A left-total relation with fail row {(fail, fail)}."""

    __slots__ = ("rel",)

    def __init__(self, rel: Relation):
        if not rel.space.has_fail:
            raise ValueError("program space needs a fail state")
        if not rel.is_program_relation():
            raise ValueError(f"not a program relation: {rel}")
        object.__setattr__(self, "rel", rel)

    def __setattr__(self, name, value):
        raise AttributeError("Program is immutable")

    @property
    def space(self) -> StateSpace:
        return self.rel.space

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return self.rel == other.rel

    def __hash__(self):
        return hash(("Program", self.rel))

    def __str__(self):
        return str(self.rel)

    def __repr__(self):
        return f"Program{self.rel}"

    # -- combinators ------------------------------------------------------

    def seq(self, other: "Program") -> "Program":
        return Program(self.rel.compose(other.rel))

    def choice(self, other: "Program") -> "Program":
        return Program(self.rel.union(other.rel))

    # -- restrictions -----------------------------------------------------

    def angelic_part(self) -> Relation:
        """Transitions between proper states (failures forgotten)."""
        return _strip_fail(self.rel)

    def demonic_part(self) -> Relation:
        """Angelic part restricted to states that can never fail."""
        f = self.space.fail_index
        safe = frozenset(x for x in self.space.proper_indices()
                         if (x, f) not in self.rel.pairs)
        return _strip_fail(self.rel.restrict_domain(safe))

    # -- orders -----------------------------------------------------------

    def approximates(self, other: "Program") -> bool:
        """Set inclusion; the meet of the two quasiorders below."""
        result = other.rel.includes(self.rel)
        if config.self_check_enabled():
            assert result == (self.quasi_partial(other) and self.quasi_total(other))
        return result

    def quasi_partial(self, other: "Program") -> bool:
        """Angelic parts under inclusion."""
        return other.angelic_part().includes(self.angelic_part())

    def quasi_total(self, other: "Program") -> bool:
        """Demonic parts under demonic refinement."""
        return self.demonic_part().refines_demonic(other.demonic_part())


def abort(space: StateSpace) -> Program:
    """The always-failing program."""
    return Program(fail_all(space))


def skip(space: StateSpace) -> Program:
    return Program(diagonal(space))


def _strip_fail(rel: Relation) -> Relation:
    """Drop all pairs touching fail and reindex onto the proper space."""
    space = rel.space
    proper = space.proper_indices()
    newindex = {old: new for new, old in enumerate(proper)}
    inner = space.drop_fail()
    return Relation(inner, ((newindex[x], newindex[y]) for x, y in rel.pairs
                            if x in newindex and y in newindex))


def _embed_pairs(rel: Relation, target: StateSpace) -> Iterable[tuple[int, int]]:
    """Reindex a fail-free relation's pairs into a space containing fail."""
    proper = target.proper_indices()
    return ((proper[x], proper[y]) for x, y in rel.pairs)


def reconstruct(a_part: Relation, d_part: Relation) -> Program:
    """The unique program with the given angelic and demonic parts.

    Well-formed inputs have d_part rows equal to a_part rows throughout
    dom(d_part); anything else matches no program and is rejected.
    """
    if a_part.space != d_part.space:
        raise ValueError("angelic and demonic parts live on different spaces")
    if a_part.space.has_fail:
        raise ValueError("parts must be fail-free relations")
    bad = sorted(x for x in d_part.dom() if d_part.image(x) != a_part.image(x))
    if bad:
        names = [a_part.space.names[x] for x in bad]
        raise ValueError(
            f"demonic rows differ from angelic rows at {names}; "
            f"no program restricts to this pair")
    target = a_part.space.extend_by_fail()
    f = target.fail_index
    proper = target.proper_indices()
    pairs = set(_embed_pairs(a_part, target))
    pairs.update((proper[x], f) for x in range(a_part.space.size)
                 if x not in d_part.dom())
    pairs.add((f, f))
    prog = Program(Relation(target, pairs))
    if config.self_check_enabled():
        assert prog.angelic_part() == a_part
        assert prog.demonic_part() == d_part
    return prog


# -- lifts from plain relations to the fail-state model ---------------------

def _chaos_rows(r: Relation, target: StateSpace) -> set[tuple[int, int]]:
    # full rows on the extended carrier for every undefined proper state
    proper = target.proper_indices()
    return {(proper[x], y)
            for x in range(r.space.size) if x not in r.dom()
            for y in range(target.size)}


def lift_angelic(r: Relation) -> Program:
    """Add the option of failing from every state."""
    if r.space.has_fail:
        raise ValueError("lift expects a fail-free relation")
    target = r.space.extend_by_fail()
    f = target.fail_index
    pairs = set(_embed_pairs(r, target))
    pairs.update((x, f) for x in range(target.size))
    return Program(Relation(target, pairs))


def lift_demonic(r: Relation) -> Program:
    """Complete undefined states with chaos; inverse of the demonic part."""
    if r.space.has_fail:
        raise ValueError("lift expects a fail-free relation")
    target = r.space.extend_by_fail()
    f = target.fail_index
    pairs = set(_embed_pairs(r, target))
    pairs |= _chaos_rows(r, target)
    pairs.add((f, f))
    prog = Program(Relation(target, pairs))
    if config.self_check_enabled():
        assert prog.demonic_part() == r
    return prog


def lift_demonic_total(r: Relation) -> Relation:
    """Chaos-complete like lift_demonic but with a full fail row (total)."""
    if r.space.has_fail:
        raise ValueError("lift expects a fail-free relation")
    target = r.space.extend_by_fail()
    f = target.fail_index
    pairs = set(_embed_pairs(r, target))
    pairs |= _chaos_rows(r, target)
    pairs.update((f, y) for y in range(target.size))
    out = Relation(target, pairs)
    assert out.is_total
    return out


def unlift_demonic_total(rel: Relation) -> Relation:
    """Invert lift_demonic_total; rejects relations outside its range.

    Membership in the range is structural — full fail row, every
    fail-touching row full, every other row nonempty — so the check works
    whatever the fail state is called.
    """
    space = rel.space
    if not space.has_fail:
        raise ValueError("expected a relation over a space with fail")
    f = space.fail_index
    everything = frozenset(range(space.size))

    def reject():
        raise ValueError(f"{rel} is not a chaos-completed total relation")

    if rel.image(f) != everything:
        reject()
    proper = space.proper_indices()
    defined = set()
    for x in proper:
        row = rel.image(x)
        if f in row:
            if row != everything:  # chaos rows are full by construction
                reject()
        elif not row:
            reject()  # the lift never produces an empty row
        else:
            defined.add(x)
    newindex = {old: new for new, old in enumerate(proper)}
    inner = space.drop_fail()
    return Relation(inner, ((newindex[x], newindex[y]) for x, y in rel.pairs
                            if x in defined))
