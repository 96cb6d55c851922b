"""Concrete relational models of finite ordered algebras.

Every constructor here follows the same recipe: check the algebra against
its class, extend it to a monoid when needed, and send each element ``a``
to the order ideal of its right translations,

    rho_a = {(x, y) : y <= x . a},

read over a base built from the carrier.  What varies is the bookkeeping
around the zero element: it can be deleted from the base and reinstated as
the fail state (weak zero), mapped to the empty relation after cutting the
fail column out of every image (zero), or kept in the base as a top element
so that every image comes out total (dual zero, with a demonic variant
obtained by stripping the chaos completion off each image).  The partial
product gets its own construction over the carrier plus one fresh point.

``verify_embedding`` replays the claims a constructor makes — injectivity,
operation preservation, order preservation *and* reflection, constant
images — and reports violations with witnesses instead of raising, so a
broken construction is inspectable.  Constructor outputs failing it is a
bug, and the test suite sweeps all small enumerated algebras through it.

Reserved base names: "1'" (adjoined identity), "e" (fresh base point of the
partial-product model).  An input algebra using them where the construction
would adjoin them is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .algebras import (
    LawViolation,
    OrderedAlgebra,
    adjoin_identity,
    check_class,
    strip_zero,
)
from .hoare import InternalCheckError
from .programs import Program, unlift_demonic_total
from .relations import (
    UNDEFINED,
    Relation,
    StateSpace,
    empty,
    fail_all,
    full,
    make_space,
)

# signature vocabulary: which symbols a representation claims to respect
COMPOSE = ";"
COMPOSE_DEMONIC = "*"
PRODUCT = "."
UNION = "|"
JOIN_DEMONIC = "||"
INCLUSION = "<="
REFINEMENT = "[="
IDENTITY_SYM = "1'"
ZERO_EMPTY = "0-as-empty"
ZERO_FULL = "0-as-full"
ZERO_FAIL = "0-as-fail"

SYMBOLS = frozenset({
    COMPOSE, COMPOSE_DEMONIC, PRODUCT, UNION, JOIN_DEMONIC,
    INCLUSION, REFINEMENT, IDENTITY_SYM, ZERO_EMPTY, ZERO_FULL, ZERO_FAIL,
})


@dataclass(frozen=True)
class Representation:
    """A family of relations standing in for an algebra's elements.

    ``map[i]`` is the image of element ``i`` of ``source``; all images live
    on ``base``.  ``signature`` names the symbols the family is supposed to
    respect, in the vocabulary above.
    """

    source: OrderedAlgebra
    base: StateSpace
    map: tuple[Relation, ...]
    signature: frozenset[str]

    def __post_init__(self):
        if len(self.map) != self.source.size:
            raise ValueError(
                f"map covers {len(self.map)} of {self.source.size} elements")
        for rel in self.map:
            if rel.space != self.base:
                raise ValueError(f"image {rel} lives off the base {self.base!r}")
        stray = self.signature - SYMBOLS
        if stray:
            raise ValueError(f"unknown signature symbols: {sorted(stray)}")

    def image(self, element: Union[int, str]) -> Relation:
        if isinstance(element, str):
            element = self.source.index(element)
        return self.map[element]

    def __repr__(self):
        sig = ",".join(sorted(self.signature))
        return (f"Representation({self.source.size} elements on "
                f"{self.base!r}; {{{sig}}})")


@dataclass(frozen=True)
class EmbeddingReport:
    violations: tuple[LawViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "embedding verified"
        lines = [f"{len(self.violations)} violation(s)"]
        lines += [f"  {v.law} at {v.witness}: {v.detail}" for v in self.violations]
        return "\n".join(lines)


def _require(alg: OrderedAlgebra, tag: str) -> None:
    report = check_class(alg, tag)
    if not report.ok:
        first = report.violations[0]
        raise ValueError(
            f"algebra is outside class {tag}: "
            f"{first.law} at {first.witness} ({first.detail})")


def _unital(alg: OrderedAlgebra, policy: str = "isolated") -> OrderedAlgebra:
    """The algebra itself when it is already a monoid, else an extension.

    A monoid is always its own compatible unital extension: monotonicity
    turns a >= 1' into ab >= b and ba >= b directly, and dually.
    """
    if alg.identity is not None:
        return alg
    return adjoin_identity(alg, policy)


def _unital_nonzero(alg: OrderedAlgebra, policy: str) -> OrderedAlgebra:
    """Unital extension whose identity differs from the zero.

    A present identity is reusable unless it *is* the zero (the one-element
    case): in the weak-zero and zero classes identity <= 0 already forces
    identity = 0, and in the dual class identity <= 0 is harmless.
    """
    if alg.identity is None or alg.identity == alg.zero:
        return adjoin_identity(alg, policy)
    return alg


def _ideal_images(ext: OrderedAlgebra, base: StateSpace,
                  pos: dict[int, int], count: int) -> tuple[Relation, ...]:
    """rho_a = {(x, y) : y <= x.a} for the first ``count`` elements of ext."""
    out = []
    for a in range(count):
        pairs = []
        for x in range(ext.size):
            xa = ext.product[x][a]
            for y in range(ext.size):
                if ext.leq[y][xa]:
                    pairs.append((pos[x], pos[y]))
        out.append(Relation(base, pairs))
    return tuple(out)


def zareckii(alg: OrderedAlgebra) -> Representation:
    """Ordered semigroups as left-total relations under ; and inclusion.

    The base is the carrier of a unital extension (the algebra itself when
    it is a monoid); note the identity's own image is generally not the
    diagonal.
    """
    _require(alg, "ordered_semigroup")
    ext = _unital(alg)
    base = StateSpace(ext.names)
    pos = {i: i for i in range(ext.size)}
    images = _ideal_images(ext, base, pos, alg.size)
    for rel in images:
        assert rel.is_left_total  # y = x.a always witnesses x
    return Representation(alg, base, images, frozenset({COMPOSE, INCLUSION}))


def _deleted_zero_base(ext: OrderedAlgebra) -> tuple[StateSpace, dict[int, int]]:
    """Base with the zero element removed and re-adjoined as the fail state."""
    zname = ext.names[ext.zero]
    proper = [nm for i, nm in enumerate(ext.names) if i != ext.zero]
    base = make_space(proper, fail_name=zname)
    pos = {i: base.index(nm) for i, nm in enumerate(ext.names)}
    return base, pos


def represent_weak_zero(alg: OrderedAlgebra) -> Representation:
    """Weak zero as the always-failing program over the nonzero carrier.

    Requires an extension in which 1' <= 0 fails; the isolated extension
    always qualifies, and a monoid qualifies as-is unless its identity *is*
    the zero (identity <= 0 forces that under the weak-zero law).
    """
    _require(alg, "weak_zero")
    z = alg.zero
    ext = _unital_nonzero(alg, "isolated")
    base, pos = _deleted_zero_base(ext)
    images = _ideal_images(ext, base, pos, alg.size)
    for rel in images:
        # the zero row collapses: y <= 0.s forces y = 0 under weak zero
        assert rel.is_program_relation()
    assert images[z] == fail_all(base)
    return Representation(alg, base, images,
                          frozenset({COMPOSE, INCLUSION, ZERO_FAIL}))


def represent_zero_angelic(alg: OrderedAlgebra) -> Representation:
    """Zero as the empty relation: cut the fail column out of each program.

    Builds the weak-zero model over an extension whose identity sits above
    the zero, then keeps only the proper-state transitions of every image.
    The cut is reversible because under a bottom zero every image carries
    the full fail column, so injectivity survives.
    """
    _require(alg, "zero")
    ext = _unital_nonzero(alg, "above_zero")
    base, pos = _deleted_zero_base(ext)
    programs = _ideal_images(ext, base, pos, alg.size)
    inner = base.drop_fail()
    images = tuple(Program(rel).angelic_part() for rel in programs)
    assert all(rel.space == inner for rel in images)
    assert images[alg.zero] == empty(inner)
    return Representation(alg, inner, images,
                          frozenset({COMPOSE, INCLUSION, ZERO_EMPTY}))


def represent_dual_zero(alg: OrderedAlgebra,
                        mode: str = "total_angelic") -> Representation:
    """Dual zero (a top absorbing element) via total relations.

    The zero stays in the base this time: because it is the top, the zero
    row of every image is full, so all images are total and the zero's own
    image is the full relation.  ``mode="demonic"`` strips the chaos
    completion off each total image, landing on plain relations under
    demonic composition and refinement with the zero at the empty relation.
    """
    if mode not in ("total_angelic", "demonic"):
        raise ValueError(f"unknown mode {mode!r}")
    _require(alg, "dual_zero")
    ext = _unital_nonzero(alg, "below_zero")
    z = alg.zero
    base, pos = _deleted_zero_base(ext)
    images = _ideal_images(ext, base, pos, alg.size)
    for rel in images:
        assert rel.is_total  # the zero row is full since everything <= 0
    assert images[z] == full(base)
    if mode == "total_angelic":
        return Representation(alg, base, images,
                              frozenset({COMPOSE, INCLUSION, ZERO_FULL}))
    inner = base.drop_fail()
    stripped = []
    for nm, rel in zip(alg.names, images):
        try:
            stripped.append(unlift_demonic_total(rel))
        except ValueError as exc:
            # a row containing the zero must be full (that product is zero),
            # so every image is chaos-completed; reaching here is a bug
            raise InternalCheckError(
                f"total image of {nm} is not chaos-completed: {exc}") from exc
    assert stripped[z] == empty(inner)
    return Representation(alg, inner, tuple(stripped),
                          frozenset({COMPOSE_DEMONIC, REFINEMENT, ZERO_EMPTY}))


def represent_preconstellation(alg: OrderedAlgebra) -> Representation:
    """Partial product over the carrier plus one fresh point ``e``.

    rho_p relates x to everything below x.p when that product exists, and
    relates e to everything below p; definedness of the relational product
    then tracks definedness in the algebra exactly.  With a designated
    zero, the zero is stripped first and sent to the empty relation.
    """
    if alg.zero is not None:
        _require(alg, "preconstellation_zero")
        if alg.size == 1:
            base = StateSpace(("e",))
            return Representation(
                alg, base, (empty(base),),
                frozenset({PRODUCT, INCLUSION, ZERO_EMPTY}))
        rest = strip_zero(alg)
        part = represent_preconstellation(rest)
        emp = empty(part.base)
        images = tuple(
            emp if i == alg.zero else part.map[rest.index(nm)]
            for i, nm in enumerate(alg.names))
        return Representation(alg, part.base, images,
                              frozenset({PRODUCT, INCLUSION, ZERO_EMPTY}))
    _require(alg, "ordered_preconstellation")
    if "e" in alg.names:
        raise ValueError("element name 'e' collides with the fresh base point")
    n = alg.size
    base = StateSpace(alg.names + ("e",))
    images = []
    for p in range(n):
        pairs = [(n, y) for y in range(n) if alg.leq[y][p]]
        for x in range(n):
            xp = alg.product[x][p]
            if xp is UNDEFINED:
                continue
            pairs.extend((x, y) for y in range(n) if alg.leq[y][xp])
        images.append(Relation(base, pairs))
    return Representation(alg, base, tuple(images),
                          frozenset({PRODUCT, INCLUSION}))


# -- verification -----------------------------------------------------------

_OPS = {
    COMPOSE: lambda s, t: s.compose(t),
    COMPOSE_DEMONIC: lambda s, t: s.compose_demonic(t),
    PRODUCT: lambda s, t: s.constellation(t),
    UNION: lambda s, t: s.union(t),
    JOIN_DEMONIC: lambda s, t: s.join_demonic(t),
}


def _least_upper_bound(alg: OrderedAlgebra, i: int, j: int):
    ups = [k for k in range(alg.size) if alg.le(i, k) and alg.le(j, k)]
    for k in ups:
        if all(alg.le(k, m) for m in ups):
            return k
    return None


def verify_embedding(rep: Representation) -> EmbeddingReport:
    """Replay every claim the signature makes, collecting witnesses.

    Order symbols are checked in both directions (preservation and
    reflection); join symbols are checked at every pair whose least upper
    bound exists in the source.  Violations come back sorted by law then
    witness, so reports are deterministic.
    """
    alg = rep.source
    names = alg.names
    found: list[LawViolation] = []

    for i in range(alg.size):
        for j in range(i + 1, alg.size):
            if rep.map[i] == rep.map[j]:
                found.append(LawViolation(
                    "injective", (names[i], names[j]),
                    "distinct elements share an image"))

    for sym in rep.signature:
        if sym in (COMPOSE, COMPOSE_DEMONIC, PRODUCT):
            found.extend(_check_operation(rep, sym))
        elif sym in (UNION, JOIN_DEMONIC):
            found.extend(_check_join(rep, sym))
        elif sym in (INCLUSION, REFINEMENT):
            found.extend(_check_order(rep, sym))
        elif sym == IDENTITY_SYM:
            found.extend(_check_identity(rep))
        else:
            found.extend(_check_zero_constant(rep, sym))

    found.sort(key=lambda v: (v.law, v.witness, v.detail))
    return EmbeddingReport(tuple(found))


def _check_operation(rep, sym):
    alg, op = rep.source, _OPS[sym]
    for i in range(alg.size):
        for j in range(alg.size):
            target = alg.product[i][j]
            got = op(rep.map[i], rep.map[j])
            if sym == PRODUCT:
                if (target is UNDEFINED) != (got is UNDEFINED):
                    side = "only in the algebra" if got is UNDEFINED \
                        else "only on the images"
                    yield LawViolation(
                        "defined-agree", (alg.names[i], alg.names[j]),
                        f"product defined {side}")
                    continue
                if target is UNDEFINED:
                    continue
            elif target is UNDEFINED:
                yield LawViolation(
                    f"preserve-{sym}", (alg.names[i], alg.names[j]),
                    "algebra product undefined under a total symbol")
                continue
            if got != rep.map[target]:
                yield LawViolation(
                    f"preserve-{sym}", (alg.names[i], alg.names[j]),
                    "image product differs from image of the product")


def _check_join(rep, sym):
    alg, op = rep.source, _OPS[sym]
    for i in range(alg.size):
        for j in range(alg.size):
            k = _least_upper_bound(alg, i, j)
            if k is None:
                continue
            if op(rep.map[i], rep.map[j]) != rep.map[k]:
                yield LawViolation(
                    f"preserve-{sym}", (alg.names[i], alg.names[j]),
                    f"join of images differs from image of {alg.names[k]}")


def _check_order(rep, sym):
    alg = rep.source
    for i in range(alg.size):
        for j in range(alg.size):
            if sym == INCLUSION:
                rel_le = rep.map[j].includes(rep.map[i])
            else:
                rel_le = rep.map[i].refines_demonic(rep.map[j])
            alg_le = alg.le(i, j)
            if alg_le and not rel_le:
                yield LawViolation(
                    f"order-preserve-{sym}", (alg.names[i], alg.names[j]),
                    "holds in the algebra, fails on the images")
            elif rel_le and not alg_le:
                yield LawViolation(
                    f"order-reflect-{sym}", (alg.names[i], alg.names[j]),
                    "holds on the images, fails in the algebra")


def _check_identity(rep):
    alg = rep.source
    if alg.identity is None:
        yield LawViolation("constant-1'", (), "no designated identity")
        return
    e = rep.map[alg.identity]
    for sym in (COMPOSE, COMPOSE_DEMONIC, PRODUCT):
        if sym not in rep.signature:
            continue
        op = _OPS[sym]
        for i, rel in enumerate(rep.map):
            if op(e, rel) != rel or op(rel, e) != rel:
                yield LawViolation(
                    "constant-1'", (alg.names[i],),
                    f"identity image is not neutral under {sym}")


_ZERO_TARGETS = {
    ZERO_EMPTY: empty,
    ZERO_FULL: full,
    ZERO_FAIL: fail_all,
}


def _check_zero_constant(rep, sym):
    alg = rep.source
    if alg.zero is None:
        yield LawViolation(f"constant-{sym}", (), "no designated zero")
        return
    if sym == ZERO_FAIL and not rep.base.has_fail:
        yield LawViolation(f"constant-{sym}", (alg.names[alg.zero],),
                           "base has no fail state")
        return
    want = _ZERO_TARGETS[sym](rep.base)
    if rep.map[alg.zero] != want:
        yield LawViolation(f"constant-{sym}", (alg.names[alg.zero],),
                           f"zero image is {rep.map[alg.zero]}, expected {want}")


def format_representation(rep: Representation) -> str:
    """Emit base and images in the space/binding literal format."""
    sp = rep.base
    proper = [sp.names[i] for i in sp.proper_indices()]
    head = "space base = {" + ", ".join(proper) + "}"
    if sp.has_fail:
        head += f" fail {sp.fail_name}"
    lines = [head]
    lines.extend(f"{nm} = {rel}" for nm, rel in zip(rep.source.names, rep.map))
    return "\n".join(lines) + "\n"
