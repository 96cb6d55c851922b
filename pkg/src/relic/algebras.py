"""Finite ordered algebras with optionally partial products.

Carriers are small tuples of named elements with a product table (cells may
be undefined), an explicit order relation validated to be a partial order,
and optionally designated identity and zero elements.  Class membership
(ordered semigroup, the zero variants, pre-constellations, idempotent
semirings) is decided by exhaustive scans that report every violated law
instance with a witness, so a failed check doubles as a counterexample
generator.  Also here: the identity/zero adjunction constructions, a
line-oriented file format, and a deterministic enumerator of all small
members of each class up to isomorphism.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .literals import FormatError
from .relations import UNDEFINED, Relation

CHECK_TAGS = (
    "ordered_semigroup",
    "weak_zero",
    "zero",
    "dual_zero",
    "preconstellation",
    "ordered_preconstellation",
    "preconstellation_zero",
    "idempotent_semiring",
)

_TOTAL_TAGS = frozenset(
    ("ordered_semigroup", "weak_zero", "zero", "dual_zero", "idempotent_semiring")
)
_PARTIAL_TAGS = frozenset(
    ("preconstellation", "ordered_preconstellation", "preconstellation_zero")
)

# the zero-product law for partial products is stated with an existence
# symbol that admits two parses; we commit to one and say so in the report
_ZERO_READING_NOTE = (
    "zero-product law read as: a defined product equal to the zero forces "
    "its left factor to be the zero"
)


@dataclass(frozen=True)
class LawViolation:
    """One failed law instance.  witness holds the element names involved."""

    law: str
    witness: tuple
    detail: str


@dataclass(frozen=True)
class ClassReport:
    """Outcome of a class check: empty violations means membership."""

    tag: str
    violations: tuple
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        head = "%s: %s" % (
            self.tag,
            "pass" if self.ok else "%d violation(s)" % len(self.violations),
        )
        lines = [head]
        lines.extend(
            "  %s %s: %s" % (v.law, "(" + ",".join(v.witness) + ")", v.detail)
            for v in self.violations
        )
        lines.extend("  note: %s" % n for n in self.notes)
        return "\n".join(lines)


class OrderedAlgebra:
    """A finite algebra (S, product, leq) with optional identity and zero.

    product cells hold element indices or UNDEFINED; UNDEFINED cells are
    only accepted under partial=True.  leq must be reflexive, antisymmetric
    and transitive; a designated identity must satisfy the identity law on
    every element.  Instances are treated as immutable.
    """

    __slots__ = ("names", "product", "leq", "identity", "zero")

    def __init__(self, names, product, leq, identity=None, zero=None, partial=False):
        names = tuple(names)
        n = len(names)
        if n == 0:
            raise ValueError("empty carrier")
        if len(set(names)) != n:
            raise ValueError("duplicate element names")
        for nm in names:
            if not nm or any(c.isspace() for c in nm):
                raise ValueError("bad element name %r" % (nm,))
        rows = []
        for row in product:
            row = tuple(UNDEFINED if c is None else c for c in row)
            if len(row) != n:
                raise ValueError("product table is not %d x %d" % (n, n))
            for c in row:
                if c is UNDEFINED:
                    if not partial:
                        raise ValueError(
                            "undefined product cell in a total algebra"
                        )
                elif not isinstance(c, (int, np.integer)) or not 0 <= c < n:
                    raise ValueError("bad product cell %r" % (c,))
            rows.append(tuple(int(c) if c is not UNDEFINED else c for c in row))
        if len(rows) != n:
            raise ValueError("product table is not %d x %d" % (n, n))
        lrows = tuple(tuple(bool(b) for b in row) for row in leq)
        if len(lrows) != n or any(len(r) != n for r in lrows):
            raise ValueError("order table is not %d x %d" % (n, n))
        for i in range(n):
            if not lrows[i][i]:
                raise ValueError("order not reflexive at %s" % names[i])
        for i in range(n):
            for j in range(n):
                if i != j and lrows[i][j] and lrows[j][i]:
                    raise ValueError(
                        "order not antisymmetric: %s <= %s <= %s"
                        % (names[i], names[j], names[i])
                    )
        for i in range(n):
            for j in range(n):
                if lrows[i][j]:
                    for k in range(n):
                        if lrows[j][k] and not lrows[i][k]:
                            raise ValueError(
                                "order not transitive: %s <= %s <= %s"
                                % (names[i], names[j], names[k])
                            )
        for c, label in ((identity, "identity"), (zero, "zero")):
            if c is not None and (not isinstance(c, (int, np.integer)) or not 0 <= c < n):
                raise ValueError("bad %s index %r" % (label, c))
        if identity is not None:
            e = identity
            for a in range(n):
                if rows[e][a] != a or rows[a][e] != a:
                    raise ValueError("%s is not an identity element" % names[e])
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "product", tuple(rows))
        object.__setattr__(self, "leq", lrows)
        object.__setattr__(self, "identity", None if identity is None else int(identity))
        object.__setattr__(self, "zero", None if zero is None else int(zero))

    def __setattr__(self, name, value):
        raise AttributeError("OrderedAlgebra is immutable")

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def is_partial(self) -> bool:
        return any(c is UNDEFINED for row in self.product for c in row)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError("no element named %r" % (name,)) from None

    def prod(self, a: int, b: int):
        return self.product[a][b]

    def le(self, a: int, b: int) -> bool:
        return self.leq[a][b]

    def __eq__(self, other):
        if not isinstance(other, OrderedAlgebra):
            return NotImplemented
        return (
            self.names == other.names
            and self.product == other.product
            and self.leq == other.leq
            and self.identity == other.identity
            and self.zero == other.zero
        )

    def __hash__(self):
        return hash((self.names, self.product, self.leq, self.identity, self.zero))

    def __repr__(self):
        kind = "partial" if self.is_partial else "total"
        return "OrderedAlgebra(%s; %s product)" % ("/".join(self.names), kind)


# ---------------------------------------------------------------------------
# law scans


def _viol(alg, law, idxs, detail):
    return LawViolation(law, tuple(alg.names[i] for i in idxs), detail)


def _totality(alg):
    out = []
    for a in range(alg.size):
        for b in range(alg.size):
            if alg.product[a][b] is UNDEFINED:
                out.append(_viol(alg, "total", (a, b), "product is undefined"))
    return out


def _assoc(alg):
    # undefined cells are reported by the totality scan; skip them here
    p, N = alg.product, alg.names
    out = []
    n = alg.size
    for a in range(n):
        for b in range(n):
            ab = p[a][b]
            if ab is UNDEFINED:
                continue
            for c in range(n):
                bc = p[b][c]
                if bc is UNDEFINED:
                    continue
                left, right = p[ab][c], p[a][bc]
                if left is UNDEFINED or right is UNDEFINED:
                    continue
                if left != right:
                    out.append(
                        _viol(
                            alg,
                            "assoc",
                            (a, b, c),
                            "(%s %s) %s = %s but %s (%s %s) = %s"
                            % (N[a], N[b], N[c], N[left], N[a], N[b], N[c], N[right]),
                        )
                    )
    return out


def _monotone(alg):
    p, L, N = alg.product, alg.leq, alg.names
    n = alg.size
    out = []
    for s in range(n):
        for t in range(n):
            if s == t or not L[s][t]:
                continue
            for u in range(n):
                us, ut = p[u][s], p[u][t]
                if us is not UNDEFINED and ut is not UNDEFINED and not L[us][ut]:
                    out.append(
                        _viol(
                            alg,
                            "left-mono",
                            (u, s, t),
                            "%s <= %s but %s %s = %s is not below %s %s = %s"
                            % (N[s], N[t], N[u], N[s], N[us], N[u], N[t], N[ut]),
                        )
                    )
                su, tu = p[s][u], p[t][u]
                if su is not UNDEFINED and tu is not UNDEFINED and not L[su][tu]:
                    out.append(
                        _viol(
                            alg,
                            "right-mono",
                            (s, t, u),
                            "%s <= %s but %s %s = %s is not below %s %s = %s"
                            % (N[s], N[t], N[s], N[u], N[su], N[t], N[u], N[tu]),
                        )
                    )
    return out


def _zero_laws(alg, kind):
    # kind: "minimal" (nothing strictly below 0), "bottom" (0 <= x),
    #       "top" (x <= 0); absorption is common to all three
    if alg.zero is None:
        return [LawViolation("zero-missing", (), "no zero designated")]
    p, L, N = alg.product, alg.leq, alg.names
    z = alg.zero
    out = []
    for s in range(alg.size):
        if p[z][s] != z:
            out.append(
                _viol(alg, "absorb-left", (s,), "%s %s is not %s" % (N[z], N[s], N[z]))
            )
        if p[s][z] != z:
            out.append(
                _viol(alg, "absorb-right", (s,), "%s %s is not %s" % (N[s], N[z], N[z]))
            )
        if kind == "minimal" and s != z and L[s][z]:
            out.append(
                _viol(
                    alg,
                    "zero-minimal",
                    (s,),
                    "%s <= %s but %s is not the zero" % (N[s], N[z], N[s]),
                )
            )
        if kind == "bottom" and not L[z][s]:
            out.append(
                _viol(alg, "zero-bottom", (s,), "%s <= %s fails" % (N[z], N[s]))
            )
        if kind == "top" and not L[s][z]:
            out.append(_viol(alg, "zero-top", (s,), "%s <= %s fails" % (N[s], N[z])))
    return out


def _partial_assoc(alg):
    # a(bc) defined forces (ab)c defined and equal
    p, N = alg.product, alg.names
    n = alg.size
    out = []
    for b in range(n):
        for c in range(n):
            bc = p[b][c]
            if bc is UNDEFINED:
                continue
            for a in range(n):
                abc = p[a][bc]
                if abc is UNDEFINED:
                    continue
                ab = p[a][b]
                ab_c = UNDEFINED if ab is UNDEFINED else p[ab][c]
                if ab_c != abc:
                    got = "undefined" if ab_c is UNDEFINED else N[ab_c]
                    out.append(
                        _viol(
                            alg,
                            "assoc-defined",
                            (a, b, c),
                            "%s (%s %s) = %s but (%s %s) %s is %s"
                            % (N[a], N[b], N[c], N[abc], N[a], N[b], N[c], got),
                        )
                    )
    return out


def _chain_defined(alg):
    # ab and bc defined forces a(bc) defined
    p, N = alg.product, alg.names
    n = alg.size
    out = []
    for a in range(n):
        for b in range(n):
            if p[a][b] is UNDEFINED:
                continue
            for c in range(n):
                bc = p[b][c]
                if bc is UNDEFINED:
                    continue
                if p[a][bc] is UNDEFINED:
                    out.append(
                        _viol(
                            alg,
                            "chain-defined",
                            (a, b, c),
                            "%s %s and %s %s are defined but %s (%s %s) is not"
                            % (N[a], N[b], N[b], N[c], N[a], N[b], N[c]),
                        )
                    )
    return out


def _leq_pairs(alg):
    n = alg.size
    return [(s, u) for s in range(n) for u in range(n) if alg.leq[s][u]]


def _order_compat(alg):
    # s<=u, t<=v and both products defined force st <= uv
    p, L, N = alg.product, alg.leq, alg.names
    pairs = _leq_pairs(alg)
    out = []
    for s, u in pairs:
        for t, v in pairs:
            st, uv = p[s][t], p[u][v]
            if st is UNDEFINED or uv is UNDEFINED:
                continue
            if not L[st][uv]:
                out.append(
                    _viol(
                        alg,
                        "order-compat",
                        (s, t, u, v),
                        "%s %s = %s is not below %s %s = %s"
                        % (N[s], N[t], N[st], N[u], N[v], N[uv]),
                    )
                )
    return out


def _defined_down(alg):
    # s<=u, t<=v and ut defined force sv defined
    p, N = alg.product, alg.names
    pairs = _leq_pairs(alg)
    out = []
    for s, u in pairs:
        for t, v in pairs:
            if p[u][t] is not UNDEFINED and p[s][v] is UNDEFINED:
                out.append(
                    _viol(
                        alg,
                        "defined-down",
                        (s, t, u, v),
                        "%s %s is defined but %s %s is not" % (N[u], N[t], N[s], N[v]),
                    )
                )
    return out


def _constellation_zero(alg):
    if alg.zero is None:
        return [LawViolation("zero-missing", (), "no zero designated")]
    p, L, N = alg.product, alg.leq, alg.names
    z = alg.zero
    out = []
    for s in range(alg.size):
        if p[z][s] != z:
            got = "undefined" if p[z][s] is UNDEFINED else N[p[z][s]]
            out.append(
                _viol(alg, "czero-left", (s,), "%s %s is %s, not %s" % (N[z], N[s], got, N[z]))
            )
        if s != z and p[s][z] is not UNDEFINED:
            out.append(
                _viol(
                    alg,
                    "czero-right",
                    (s,),
                    "%s %s is defined but %s is not the zero" % (N[s], N[z], N[s]),
                )
            )
        if not L[z][s]:
            out.append(
                _viol(alg, "czero-bottom", (s,), "%s <= %s fails" % (N[z], N[s]))
            )
    for s in range(alg.size):
        if s == z:
            continue
        for t in range(alg.size):
            if p[s][t] == z:
                out.append(
                    _viol(
                        alg,
                        "czero-value",
                        (s, t),
                        "%s %s = %s but %s is not the zero" % (N[s], N[t], N[z], N[s]),
                    )
                )
    return out


def _join_table(alg):
    """Least upper bounds under leq; None where a pair has no join."""
    n = alg.size
    L = alg.leq
    jt = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            ups = [c for c in range(n) if L[a][c] and L[b][c]]
            least = [c for c in ups if all(L[c][d] for d in ups)]
            if least:
                jt[a][b] = least[0]
    return jt


def _semiring(alg):
    p, N = alg.product, alg.names
    n = alg.size
    jt = _join_table(alg)
    out = []
    for a in range(n):
        for b in range(a, n):
            if jt[a][b] is None:
                out.append(
                    _viol(alg, "join-missing", (a, b), "no least upper bound")
                )
    if out or alg.is_partial:
        return out
    for a in range(n):
        for b in range(n):
            ab = jt[a][b]
            for c in range(n):
                for d in range(n):
                    lhs = p[ab][jt[c][d]]
                    rhs = jt[jt[p[a][c]][p[a][d]]][jt[p[b][c]][p[b][d]]]
                    if lhs != rhs:
                        out.append(
                            _viol(
                                alg,
                                "distrib",
                                (a, b, c, d),
                                "join-of-products is %s but product-of-joins is %s"
                                % (N[rhs], N[lhs]),
                            )
                        )
    return out


def check_class(alg: OrderedAlgebra, tag: str) -> ClassReport:
    """Exhaustively check every law of the named class; see CHECK_TAGS."""
    if tag not in CHECK_TAGS:
        raise ValueError(
            "unknown class tag %r; expected one of: %s" % (tag, ", ".join(CHECK_TAGS))
        )
    v = []
    notes = ()
    if tag in _TOTAL_TAGS:
        v += _totality(alg)
        v += _assoc(alg)
        if tag == "idempotent_semiring":
            v += _semiring(alg)
        else:
            v += _monotone(alg)
            if tag == "weak_zero":
                v += _zero_laws(alg, "minimal")
            elif tag == "zero":
                v += _zero_laws(alg, "bottom")
            elif tag == "dual_zero":
                v += _zero_laws(alg, "top")
    else:
        v += _partial_assoc(alg)
        v += _chain_defined(alg)
        if tag in ("ordered_preconstellation", "preconstellation_zero"):
            v += _order_compat(alg)
            v += _defined_down(alg)
        if tag == "preconstellation_zero":
            v += _constellation_zero(alg)
            notes = (_ZERO_READING_NOTE,)
    return ClassReport(tag, tuple(v), notes)


# ---------------------------------------------------------------------------
# extension constructions


def _fresh_name(names, wanted):
    if wanted in names:
        raise ValueError("element name %r already taken" % (wanted,))
    return wanted


def _transitive_closure(rows):
    n = len(rows)
    m = [list(r) for r in rows]
    for k in range(n):
        for i in range(n):
            if m[i][k]:
                mk = m[k]
                mi = m[i]
                for j in range(n):
                    if mk[j]:
                        mi[j] = True
    return tuple(tuple(r) for r in m)


def adjoin_identity(alg: OrderedAlgebra, policy: str = "isolated") -> OrderedAlgebra:
    """Extend by a fresh identity element named 1'.

    policy picks the order relationship of the new identity: "isolated"
    leaves it comparable only to itself, "above_zero" adds zero < 1',
    "below_zero" adds 1' < zero.  The extension must stay compatible:
    a >= 1' forces ab >= b and ba >= b, and dually below; a violating pair
    raises ValueError.
    """
    if policy not in ("isolated", "above_zero", "below_zero"):
        raise ValueError("unknown policy %r" % (policy,))
    if alg.is_partial:
        raise ValueError("cannot adjoin an identity to a partial product")
    n = alg.size
    name = _fresh_name(alg.names, "1'")
    product = [list(row) + [i] for i, row in enumerate(alg.product)]
    product.append(list(range(n)) + [n])
    leq = [list(row) + [False] for row in alg.leq]
    leq.append([False] * n + [True])
    if policy != "isolated":
        if alg.zero is None:
            raise ValueError("policy %r needs a designated zero" % (policy,))
        if policy == "above_zero":
            leq[alg.zero][n] = True
        else:
            leq[n][alg.zero] = True
    closed = _transitive_closure(leq)
    out = OrderedAlgebra(
        alg.names + (name,), product, closed, identity=n, zero=alg.zero
    )
    N, L, p = out.names, out.leq, out.product
    for a in range(n + 1):
        for b in range(n + 1):
            if L[n][a]:
                if not L[b][p[a][b]]:
                    raise ValueError(
                        "policy %r is not compatible: %s >= 1' but %s %s = %s "
                        "is not above %s" % (policy, N[a], N[a], N[b], N[p[a][b]], N[b])
                    )
                if not L[b][p[b][a]]:
                    raise ValueError(
                        "policy %r is not compatible: %s >= 1' but %s %s = %s "
                        "is not above %s" % (policy, N[a], N[b], N[a], N[p[b][a]], N[b])
                    )
            if L[a][n]:
                if not L[p[a][b]][b]:
                    raise ValueError(
                        "policy %r is not compatible: %s <= 1' but %s %s = %s "
                        "is not below %s" % (policy, N[a], N[a], N[b], N[p[a][b]], N[b])
                    )
                if not L[p[b][a]][b]:
                    raise ValueError(
                        "policy %r is not compatible: %s <= 1' but %s %s = %s "
                        "is not below %s" % (policy, N[a], N[b], N[a], N[p[b][a]], N[b])
                    )
    return out


def adjoin_zero(alg: OrderedAlgebra) -> OrderedAlgebra:
    """Extend by a fresh absorbing zero named 0, below every element."""
    if alg.is_partial:
        raise ValueError("cannot adjoin an absorbing zero to a partial product")
    n = alg.size
    name = _fresh_name(alg.names, "0")
    product = [list(row) + [n] for row in alg.product]
    product.append([n] * (n + 1))
    leq = [list(row) + [False] for row in alg.leq]
    leq.append([True] * (n + 1))
    return OrderedAlgebra(
        alg.names + (name,), product, leq, identity=alg.identity, zero=n
    )


def adjoin_constellation_zero(alg: OrderedAlgebra) -> OrderedAlgebra:
    """Extend a partial-product algebra by a zero named 0.

    The zero multiplies everything to itself on the left, is never a right
    factor of a defined product (except 0 0 = 0), and sits below every
    element.  Any designated identity is dropped: 1' 0 is undefined in the
    extension, so the identity law no longer holds on all of the carrier.
    """
    n = alg.size
    name = _fresh_name(alg.names, "0")
    product = [list(row) + [UNDEFINED] for row in alg.product]
    product.append([n] * (n + 1))
    leq = [list(row) + [False] for row in alg.leq]
    leq.append([True] * (n + 1))
    return OrderedAlgebra(
        alg.names + (name,), product, leq, zero=n, partial=True
    )


def strip_zero(alg: OrderedAlgebra) -> OrderedAlgebra:
    """Remove the designated zero element, undoing either adjunction."""
    if alg.zero is None:
        raise ValueError("no zero designated")
    if alg.size == 1:
        raise ValueError("cannot strip the only element")
    z = alg.zero
    keep = [i for i in range(alg.size) if i != z]
    remap = {old: new for new, old in enumerate(keep)}
    product = []
    for a in keep:
        row = []
        for b in keep:
            c = alg.product[a][b]
            if c is UNDEFINED:
                row.append(UNDEFINED)
            elif c == z:
                raise ValueError(
                    "cannot strip zero: %s %s = %s"
                    % (alg.names[a], alg.names[b], alg.names[z])
                )
            else:
                row.append(remap[c])
        product.append(row)
    leq = [[alg.leq[a][b] for b in keep] for a in keep]
    identity = remap[alg.identity] if alg.identity is not None else None
    partial = any(c is UNDEFINED for row in product for c in row)
    return OrderedAlgebra(
        tuple(alg.names[i] for i in keep),
        product,
        leq,
        identity=identity,
        partial=partial,
    )


# ---------------------------------------------------------------------------
# materialization from concrete relations


def from_relations(
    elements,
    product,
    leq,
    *,
    names=None,
    identity: Optional[Relation] = None,
    zero: Optional[Relation] = None,
) -> OrderedAlgebra:
    """Tabulate a finite family of relations as an algebra.

    product is a binary callable returning a Relation or UNDEFINED, leq a
    binary predicate; identity and zero are picked out of elements by
    equality.  Products escaping the carrier raise ValueError.
    """
    elements = list(elements)
    index = {}
    for i, r in enumerate(elements):
        if r in index:
            raise ValueError("duplicate carrier element at position %d" % i)
        index[r] = i
    if names is None:
        names = tuple("r%d" % i for i in range(len(elements)))
    table = []
    for a in elements:
        row = []
        for b in elements:
            v = product(a, b)
            if v is UNDEFINED:
                row.append(UNDEFINED)
            elif v in index:
                row.append(index[v])
            else:
                raise ValueError("product escapes the carrier: %s" % (v,))
        table.append(row)
    lrows = [[bool(leq(a, b)) for b in elements] for a in elements]
    partial = any(c is UNDEFINED for row in table for c in row)

    def locate(r, label):
        if r is None:
            return None
        if r not in index:
            raise ValueError("%s element is not in the carrier" % label)
        return index[r]

    return OrderedAlgebra(
        names,
        table,
        lrows,
        identity=locate(identity, "identity"),
        zero=locate(zero, "zero"),
        partial=partial,
    )


# ---------------------------------------------------------------------------
# file format


def parse_algebra(text: str) -> OrderedAlgebra:
    """Parse the line-oriented algebra format.

    elements a b c        carrier, required first
    order a<=b c<=a       strict pairs; reflexivity is implied
    prod a b = c          one product cell; "undef" leaves it undefined
    identity a            optional
    zero z                optional

    '#' starts a comment.  Duplicate product cells are rejected.  Cells
    never mentioned stay undefined.
    """
    names = None
    order_pairs = set()
    cells = {}
    identity = None
    zero = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "elements":
            if names is not None:
                raise FormatError("line %d: repeated elements line" % lineno)
            if len(parts) < 2:
                raise FormatError("line %d: elements line names nothing" % lineno)
            names = tuple(parts[1:])
            if len(set(names)) != len(names):
                raise FormatError("line %d: duplicate element names" % lineno)
            continue
        if names is None:
            raise FormatError(
                "line %d: %r before the elements line" % (lineno, head)
            )
        lookup = {nm: i for i, nm in enumerate(names)}
        if head == "order":
            for tok in parts[1:]:
                bits = tok.split("<=")
                if len(bits) != 2 or not all(b in lookup for b in bits):
                    raise FormatError("line %d: bad order pair %r" % (lineno, tok))
                order_pairs.add((lookup[bits[0]], lookup[bits[1]]))
        elif head == "prod":
            if len(parts) != 5 or parts[3] != "=":
                raise FormatError("line %d: expected 'prod a b = c'" % lineno)
            a, b, val = parts[1], parts[2], parts[4]
            if a not in lookup or b not in lookup:
                raise FormatError("line %d: unknown element in %r" % (lineno, line))
            key = (lookup[a], lookup[b])
            if key in cells:
                raise FormatError(
                    "line %d: duplicate product cell %s %s" % (lineno, a, b)
                )
            if val == "undef":
                cells[key] = UNDEFINED
            elif val in lookup:
                cells[key] = lookup[val]
            else:
                raise FormatError("line %d: unknown element %r" % (lineno, val))
        elif head == "identity":
            if len(parts) != 2 or parts[1] not in lookup:
                raise FormatError("line %d: bad identity line" % lineno)
            if identity is not None:
                raise FormatError("line %d: repeated identity line" % lineno)
            identity = lookup[parts[1]]
        elif head == "zero":
            if len(parts) != 2 or parts[1] not in lookup:
                raise FormatError("line %d: bad zero line" % lineno)
            if zero is not None:
                raise FormatError("line %d: repeated zero line" % lineno)
            zero = lookup[parts[1]]
        else:
            raise FormatError("line %d: unknown directive %r" % (lineno, head))
    if names is None:
        raise FormatError("missing elements line")
    n = len(names)
    product = [
        [cells.get((a, b), UNDEFINED) for b in range(n)] for a in range(n)
    ]
    leq = [[a == b or (a, b) in order_pairs for b in range(n)] for a in range(n)]
    partial = any(c is UNDEFINED for row in product for c in row)
    return OrderedAlgebra(
        names, product, leq, identity=identity, zero=zero, partial=partial
    )


def format_algebra(alg: OrderedAlgebra) -> str:
    """Render in the format accepted by parse_algebra, every cell explicit."""
    lines = ["elements " + " ".join(alg.names)]
    strict = [
        "%s<=%s" % (alg.names[a], alg.names[b])
        for a in range(alg.size)
        for b in range(alg.size)
        if a != b and alg.leq[a][b]
    ]
    if strict:
        lines.append("order " + " ".join(strict))
    for a in range(alg.size):
        for b in range(alg.size):
            c = alg.product[a][b]
            val = "undef" if c is UNDEFINED else alg.names[c]
            lines.append("prod %s %s = %s" % (alg.names[a], alg.names[b], val))
    if alg.identity is not None:
        lines.append("identity " + alg.names[alg.identity])
    if alg.zero is not None:
        lines.append("zero " + alg.names[alg.zero])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# enumeration of small class members


@functools.lru_cache(maxsize=None)
def _all_posets(n):
    """Every partial order on n labelled points, sorted, as bool tuples."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for bits in range(1 << len(pairs)):
        chosen = {pairs[k] for k in range(len(pairs)) if bits >> k & 1}
        if any((j, i) in chosen for i, j in chosen):
            continue
        ok = True
        for i, j in chosen:
            for j2, k in chosen:
                if j2 == j and (i, k) not in chosen and i != k:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        out.append(
            tuple(
                tuple(i == j or (i, j) in chosen for j in range(n)) for i in range(n)
            )
        )
    out.sort()
    return tuple(out)


def _serialize(prod_digits, leq, zero, n):
    # product digits (undefined encoded as n), order bits, zero digit
    ser = []
    for row in prod_digits:
        ser.extend(row)
    for row in leq:
        ser.extend(int(b) for b in row)
    ser.append(n if zero is None else zero)
    return tuple(ser)


def _transforms(n, with_transpose):
    out = []
    for p in itertools.permutations(range(n)):
        for tr in ((False, True) if with_transpose else (False,)):
            out.append((p, tr))
    return out


def _transform_py(prod_digits, leq, zero, n, perm, transpose):
    inv = [0] * n
    for i, v in enumerate(perm):
        inv[v] = i
    ext = list(perm) + [n]
    np_ = [
        [ext[prod_digits[inv[i]][inv[j]]] for j in range(n)] for i in range(n)
    ]
    if transpose:
        np_ = [[np_[j][i] for j in range(n)] for i in range(n)]
    nl = [[leq[inv[i]][inv[j]] for j in range(n)] for i in range(n)]
    nz = None if zero is None else perm[zero]
    return np_, nl, nz


def _is_canonical_py(prod_digits, leq, zero, n, with_transpose):
    base = _serialize(prod_digits, leq, zero, n)
    for perm, tr in _transforms(n, with_transpose):
        if tr is False and perm == tuple(range(n)):
            continue
        cand = _serialize(*_transform_py(prod_digits, leq, zero, n, perm, tr), n)
        if cand < base:
            return False
    return True


def _materialize(prod_digits, leq, zero, n, partial):
    names = tuple("abcd"[:n])
    product = [
        [UNDEFINED if c == n else int(c) for c in row] for row in prod_digits
    ]
    return OrderedAlgebra(
        names,
        product,
        [list(row) for row in leq],
        zero=None if zero is None else int(zero),
        partial=partial,
    )


# vectorized filters over stacked digit tables (sentinel n = undefined)


def _digit_tables(n, base):
    k = n * n
    count = base**k
    codes = np.arange(count, dtype=np.int64)
    cols = []
    for pos in range(k):
        cols.append(((codes // (base ** (k - 1 - pos))) % base).astype(np.int8))
    return np.stack(cols, axis=1).reshape(count, n, n)


def _mask_assoc(T, n):
    m = len(T)
    r = np.arange(m)
    mask = np.ones(m, dtype=bool)
    for a in range(n):
        for b in range(n):
            ab = T[:, a, b]
            for c in range(n):
                mask &= T[r, ab, c] == T[r, a, T[:, b, c]]
    return mask


def _pad_sentinel(T, n):
    m = len(T)
    P = np.full((m, n + 1, n + 1), n, dtype=np.int8)
    P[:, :n, :n] = T
    return P


def _mask_precon_laws(T, n):
    m = len(T)
    P = _pad_sentinel(T, n)
    r = np.arange(m)
    mask = np.ones(m, dtype=bool)
    for a in range(n):
        for b in range(n):
            ab = T[:, a, b]
            for c in range(n):
                bc = T[:, b, c]
                a_bc = P[r, a, bc]
                ab_c = P[r, ab, c]
                mask &= (a_bc == n) | (ab_c == a_bc)
                mask &= (ab == n) | (bc == n) | (a_bc != n)
    return mask


def _mask_monotone(T, Lb, n):
    mask = np.ones(len(T), dtype=bool)
    for s in range(n):
        for t in range(n):
            if s == t or not Lb[s][t]:
                continue
            for u in range(n):
                mask &= Lb[T[:, u, s], T[:, u, t]]
                mask &= Lb[T[:, s, u], T[:, t, u]]
    return mask


def _mask_ordered_precon(T, L, n):
    LbE = np.zeros((n + 1, n + 1), dtype=bool)
    LbE[:n, :n] = np.array(L, dtype=bool)
    pairs = [(s, u) for s in range(n) for u in range(n) if L[s][u]]
    mask = np.ones(len(T), dtype=bool)
    for s, u in pairs:
        for t, v in pairs:
            st = T[:, s, t]
            uv = T[:, u, v]
            mask &= (st == n) | (uv == n) | LbE[st, uv]
            mask &= (T[:, u, t] == n) | (T[:, s, v] != n)
    return mask


def _absorbing_vec(T, n):
    out = np.full(len(T), n, dtype=np.int8)
    for z in range(n):
        hit = (T[:, z, :] == z).all(axis=1) & (T[:, :, z] == z).all(axis=1)
        out[hit] = z
    return out


def _czero_vec(T, n):
    out = np.full(len(T), n, dtype=np.int8)
    for z in range(n):
        ok = (T[:, z, :] == z).all(axis=1)
        for s in range(n):
            if s == z:
                continue
            ok &= T[:, s, z] == n
            ok &= ~(T[:, s, :] == z).any(axis=1)
        out[ok] = z
    return out


def _mask_distrib(T, L, n):
    jt = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            ups = [c for c in range(n) if L[a][c] and L[b][c]]
            least = [c for c in ups if all(L[c][d] for d in ups)]
            if not least:
                return None
            jt[a][b] = least[0]
    jn = np.array(jt, dtype=np.int8)
    r = np.arange(len(T))
    mask = np.ones(len(T), dtype=bool)
    for a in range(n):
        for b in range(n):
            ab = int(jn[a, b])
            for c in range(n):
                for d in range(n):
                    lhs = T[r, ab, int(jn[c, d])]
                    rhs = jn[jn[T[:, a, c], T[:, a, d]], jn[T[:, b, c], T[:, b, d]]]
                    mask &= lhs == rhs
    return mask


def _lex_le_rows(A, B):
    diff = A != B
    any_diff = diff.any(axis=1)
    first = diff.argmax(axis=1)
    a = np.take_along_axis(A, first[:, None], 1)[:, 0]
    b = np.take_along_axis(B, first[:, None], 1)[:, 0]
    return np.where(any_diff, a < b, True)


def _ser_arrays(prodA, leqA, zeroA, n):
    m = len(prodA)
    return np.concatenate(
        [
            prodA.reshape(m, n * n),
            leqA.reshape(m, n * n).astype(np.int8),
            zeroA.reshape(m, 1),
        ],
        axis=1,
    )


def _enumerate_size_vectorized(tag, n):
    partial = tag in _PARTIAL_TAGS
    base = n + 1 if partial else n
    T = _digit_tables(n, base)
    if partial:
        T = T[_mask_precon_laws(T, n)]
    else:
        T = T[_mask_assoc(T, n)]
    zero_of_table = None
    if tag in ("weak_zero", "zero", "dual_zero"):
        absz = _absorbing_vec(T, n)
        keep = absz != n
        T, zero_of_table = T[keep], absz[keep]
    elif tag == "preconstellation_zero":
        cz = _czero_vec(T, n)
        keep = cz != n
        T, zero_of_table = T[keep], cz[keep]

    prods, leqs, zeros = [], [], []

    def collect(sel_T, L, sel_zero):
        if not len(sel_T):
            return
        prods.append(sel_T)
        leqs.append(
            np.broadcast_to(np.array(L, dtype=bool), (len(sel_T), n, n)).copy()
        )
        zeros.append(sel_zero)

    if tag == "preconstellation":
        eq = tuple(tuple(i == j for j in range(n)) for i in range(n))
        collect(T, eq, np.full(len(T), n, dtype=np.int8))
    else:
        for L in _all_posets(n):
            Lb = np.array(L, dtype=bool)
            if tag in ("ordered_preconstellation", "preconstellation_zero"):
                m = _mask_ordered_precon(T, L, n)
            elif tag == "idempotent_semiring":
                m = _mask_distrib(T, L, n)
                if m is None:
                    continue
            else:
                m = _mask_monotone(T, Lb, n)
            if zero_of_table is not None:
                z = zero_of_table
                if tag == "weak_zero":
                    okz = np.array(
                        [
                            all(not L[s][zz] for s in range(n) if s != zz)
                            for zz in range(n)
                        ]
                        + [False]
                    )
                elif tag in ("zero", "preconstellation_zero"):
                    okz = np.array(
                        [all(L[zz][s] for s in range(n)) for zz in range(n)] + [False]
                    )
                else:
                    okz = np.array(
                        [all(L[s][zz] for s in range(n)) for zz in range(n)] + [False]
                    )
                m = m & okz[z.astype(np.int64)]
                collect(T[m], L, z[m])
            else:
                collect(T[m], L, np.full(int(m.sum()), n, dtype=np.int8))

    if not prods:
        return []
    prodA = np.concatenate(prods)
    leqA = np.concatenate(leqs)
    zeroA = np.concatenate(zeros)
    ser = _ser_arrays(prodA, leqA, zeroA, n)
    canon = np.ones(len(prodA), dtype=bool)
    with_transpose = tag in _TOTAL_TAGS
    for perm, tr in _transforms(n, with_transpose):
        if not tr and perm == tuple(range(n)):
            continue
        inv = np.argsort(np.array(perm))
        pmap = np.array(list(perm) + [n], dtype=np.int8)
        pr = pmap[prodA[:, inv][:, :, inv]]
        if tr:
            pr = pr.transpose(0, 2, 1)
        lq = leqA[:, inv][:, :, inv]
        zr = pmap[zeroA.astype(np.int64)]
        canon &= _lex_le_rows(ser, _ser_arrays(pr, lq, zr, n))
    ser = ser[canon]
    prodA, leqA, zeroA = prodA[canon], leqA[canon], zeroA[canon]
    order = np.lexsort(ser.T[::-1])
    out = []
    for i in order:
        zd = int(zeroA[i])
        out.append(
            _materialize(
                prodA[i].tolist(),
                leqA[i].tolist(),
                None if zd == n else zd,
                n,
                partial,
            )
        )
    return out


# incremental checks on partially filled tables (-1 = not yet chosen)


def _assoc_ok_fill(t, n):
    for a in range(n):
        ta = t[a]
        for b in range(n):
            ab = ta[b]
            if ab < 0:
                continue
            tb = t[b]
            for c in range(n):
                bc = tb[c]
                if bc < 0:
                    continue
                left = t[ab][c]
                right = ta[bc]
                if left >= 0 and right >= 0 and left != right:
                    return False
    return True


def _precon_ok_fill(t, n):
    u = n
    for b in range(n):
        tb = t[b]
        for c in range(n):
            bc = tb[c]
            if bc < 0 or bc == u:
                continue
            for a in range(n):
                ab = t[a][b]
                abc = t[a][bc]
                if abc >= 0 and abc != u:
                    # defined nested product forces the shifted one
                    if ab == u:
                        return False
                    if ab >= 0:
                        ab_c = t[ab][c]
                        if ab_c >= 0 and ab_c != abc:
                            return False
                if ab >= 0 and ab != u and abc == u:
                    return False
    return True


def _passes_order_py(tag, pd, L, zero, n):
    u = n
    if tag in ("ordered_preconstellation", "preconstellation_zero"):
        pairs = [(s, t) for s in range(n) for t in range(n) if L[s][t]]
        for s, a in pairs:
            for t, v in pairs:
                st, av = pd[s][t], pd[a][v]
                if st != u and av != u and not L[st][av]:
                    return False
                if pd[a][t] != u and pd[s][v] == u:
                    return False
        if tag == "preconstellation_zero" and any(
            not L[zero][s] for s in range(n)
        ):
            return False
        return True
    if tag == "idempotent_semiring":
        jt = [[None] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                ups = [c for c in range(n) if L[a][c] and L[b][c]]
                least = [c for c in ups if all(L[c][d] for d in ups)]
                if not least:
                    return False
                jt[a][b] = least[0]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        lhs = pd[jt[a][b]][jt[c][d]]
                        rhs = jt[jt[pd[a][c]][pd[a][d]]][jt[pd[b][c]][pd[b][d]]]
                        if lhs != rhs:
                            return False
        return True
    for s in range(n):
        for t in range(n):
            if s == t or not L[s][t]:
                continue
            for w in range(n):
                if not L[pd[w][s]][pd[w][t]] or not L[pd[s][w]][pd[t][w]]:
                    return False
    if tag == "weak_zero":
        return all(not L[s][zero] for s in range(n) if s != zero)
    if tag == "zero":
        return all(L[zero][s] for s in range(n))
    if tag == "dual_zero":
        return all(L[s][zero] for s in range(n))
    return True


def _table_zero_py(tag, pd, n):
    """Designated zero forced by the table, or (None, ok)."""
    u = n
    if tag in ("weak_zero", "zero", "dual_zero"):
        for z in range(n):
            if all(pd[z][s] == z and pd[s][z] == z for s in range(n)):
                return z, True
        return None, False
    if tag == "preconstellation_zero":
        for z in range(n):
            if all(pd[z][s] == z for s in range(n)) and all(
                pd[s][z] == u for s in range(n) if s != z
            ):
                if all(
                    pd[s][t] != z
                    for s in range(n)
                    if s != z
                    for t in range(n)
                ):
                    return z, True
        return None, False
    return None, True


def _enumerate_size_backtrack(tag, n):
    partial = tag in _PARTIAL_TAGS
    alphabet = n + 1 if partial else n
    check = _precon_ok_fill if partial else _assoc_ok_fill
    if tag == "preconstellation":
        posets = [tuple(tuple(i == j for j in range(n)) for i in range(n))]
    else:
        posets = _all_posets(n)
    with_transpose = tag in _TOTAL_TAGS
    t = [[-1] * n for _ in range(n)]

    def walk(pos):
        if pos == n * n:
            yield tuple(tuple(row) for row in t)
            return
        i, j = divmod(pos, n)
        for v in range(alphabet):
            t[i][j] = v
            if check(t, n):
                yield from walk(pos + 1)
        t[i][j] = -1

    for pd in walk(0):
        zero, ok = _table_zero_py(tag, pd, n)
        if not ok:
            continue
        for L in posets:
            if not _passes_order_py(tag, pd, L, zero, n):
                continue
            if _is_canonical_py(pd, L, zero, n, with_transpose):
                yield _materialize(pd, L, zero, n, partial)


def enumerate_small(tag: str, size_bound: int):
    """All members of the class up to size_bound, one per isomorphism type.

    Total-product classes are also deduplicated against the product-reversed
    table (the reversed algebra satisfies the same laws); the partial-product
    classes are not closed under reversal, so those use plain isomorphism.
    The stream is deterministic: sizes ascend and within a size the chosen
    representatives come in lexicographic table order.  Size 4 falls back to
    a backtracking search; for the partial-product classes that is practical
    only as a lazy prefix.
    """
    if tag not in CHECK_TAGS:
        raise ValueError(
            "unknown class tag %r; expected one of: %s" % (tag, ", ".join(CHECK_TAGS))
        )
    if not isinstance(size_bound, int) or size_bound < 1:
        raise ValueError("size bound must be a positive integer")
    if size_bound > 4:
        raise ValueError("size bound above 4 is not supported")
    for n in range(1, size_bound + 1):
        if n <= 3:
            yield from _enumerate_size_vectorized(tag, n)
        else:
            yield from _enumerate_size_backtrack(tag, n)
