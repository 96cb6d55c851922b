"""Representation game: networks, moves, legality, minimal responses.

Two players argue whether an ordered-semigroup-like structure embeds into
relations under demonic composition.  A network carries up-closed label
sets on node pairs plus per-node forbidden sets; the universal player
attacks with three move kinds (witness, demonic, choice) after an initial
pledge a !<= b, and wins if the pledged b ever appears on the pledge edge
or the network goes inconsistent.

Label sets are stored as minimal generator antichains (the up-closure is
implied), so structures with infinite carriers — lazy word algebras in
particular — play without ever materialising their elements.  Networks
are persistent values: every operation returns a new network.

The existential player's response space is restricted here to *minimal*
responses: one response per candidate reuse node plus one with a single
fresh node (choice moves: accept plus the one-fresh-node reject).  Extra
labels or nodes only give the universal player more to attack, so a
forced win against minimal responses is strong evidence, but the
reduction is not itself proved; callers that report non-representability
from game search qualify the verdict accordingly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from . import words as W
from .algebras import OrderedAlgebra
from .relations import UNDEFINED


class GameError(ValueError):
    pass


# ---------------------------------------------------------------------------
# algebra adapters
# ---------------------------------------------------------------------------

class AnAlgebra:
    """The lazy word structure for a given n (identity = empty word)."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.identity = W.EMPTY

    def leq(self, a, b) -> bool:
        return W.an_leq(self.n, a, b)

    def prod(self, a, b):
        return tuple(a) + tuple(b)

    def upclose(self, a) -> frozenset:
        return W.an_upclose(self.n, a)

    def lower_bounds(self, a) -> tuple:
        p = W.predecessor(self.n, a)
        return (a,) if p is None else (a, p)

    def factorizations(self, w) -> list:
        return [(w[:i], w[i:]) for i in range(len(w) + 1)]

    def elements(self):
        return None  # not enumerable

    def format(self, a) -> str:
        return W.format_word(a)

    def parse(self, text: str):
        return W.parse_word(self.n, text)

    def sort_key(self, a):
        return (len(a), a)


class TableAlgebra:
    """Finite ordered algebra as a game structure (partial products allowed:
    undefined products simply never occur as move labels, and choice moves
    over them cannot be accepted).  Order rows, cones and factorization
    lists are precomputed; the search layer leans on them heavily."""

    def __init__(self, alg: OrderedAlgebra):
        self.alg = alg
        self.identity = alg.identity
        n = alg.size
        self._le = alg.leq
        self._prod = [[None] * n for _ in range(n)]
        fact = [[] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                c = alg.prod(a, b)
                if c is not UNDEFINED:
                    self._prod[a][b] = c
                    fact[c].append((a, b))
        self._fact = [tuple(f) for f in fact]
        self._up = [frozenset(b for b in range(n) if self._le[a][b])
                    for a in range(n)]
        self._low = [tuple(b for b in range(n) if self._le[b][a])
                     for a in range(n)]

    def leq(self, a, b) -> bool:
        return self._le[a][b]

    def prod(self, a, b):
        return self._prod[a][b]

    def upclose(self, a) -> frozenset:
        return self._up[a]

    def lower_bounds(self, a) -> tuple:
        return self._low[a]

    def factorizations(self, w) -> tuple:
        return self._fact[w]

    def elements(self):
        return range(self.alg.size)

    def format(self, a) -> str:
        return self.alg.names[a]

    def parse(self, text: str):
        return self.alg.index(text)

    def sort_key(self, a):
        return a


Algebra = Union[AnAlgebra, TableAlgebra]


# ---------------------------------------------------------------------------
# networks
# ---------------------------------------------------------------------------

_EMPTY_FORB = (frozenset(), False)


class Network:
    """Nodes, up-closed labels (as generator antichains), forbidden sets.

    ``has_identity`` selects the signature variant: when set, the identity
    element must label exactly the reflexive edges.  A forbidden entry is
    a finite element set plus an "every non-identity element" flag (used
    by terminal nodes of grid-built networks, whose forbidden set is the
    whole positive carrier).
    """

    __slots__ = ("nodes", "labels", "forb", "has_identity")

    def __init__(self, nodes=(), labels=None, forb=None, has_identity=True):
        self.nodes = tuple(nodes)
        self.labels = dict(labels or {})   # (x, y) -> frozenset of generators
        self.forb = dict(forb or {})       # x -> (frozenset, all_but_identity)
        self.has_identity = has_identity

    # -- queries ------------------------------------------------------------

    def gens(self, x, y) -> frozenset:
        return self.labels.get((x, y), frozenset())

    def has_label(self, alg: Algebra, x, y, e) -> bool:
        gens = self.labels.get((x, y))
        if not gens:
            return False
        leq = alg.leq
        for g in gens:
            if leq(g, e):
                return True
        return False

    def members(self, alg: Algebra, x, y) -> frozenset:
        gens = self.labels.get((x, y))
        if not gens:
            return frozenset()
        out = set()
        for g in gens:
            out |= alg.upclose(g)
        return frozenset(out)

    def forb_contains(self, alg: Algebra, x, e) -> bool:
        fixed, all_pos = self.forb.get(x, _EMPTY_FORB)
        if e in fixed:
            return True
        return all_pos and e != alg.identity

    def labelled_pairs(self):
        """Pairs with nonempty label, in node order."""
        for x in self.nodes:
            for y in self.nodes:
                if self.labels.get((x, y)):
                    yield x, y

    def first_inconsistency(self, alg: Algebra):
        for x in self.nodes:
            fixed, all_pos = self.forb.get(x, _EMPTY_FORB)
            if not fixed and not all_pos:
                continue
            for y in self.nodes:
                for e in sorted(self.members(alg, x, y), key=alg.sort_key):
                    if self.forb_contains(alg, x, e):
                        return x, y, e
        return None

    def is_consistent(self, alg: Algebra) -> bool:
        return self.first_inconsistency(alg) is None

    def well_formed(self, alg: Algebra):
        if len(set(self.nodes)) != len(self.nodes):
            return False, "duplicate nodes"
        for (x, y) in self.labels:
            if x not in self.nodes or y not in self.nodes:
                return False, f"label on unknown node pair ({x},{y})"
        for x in self.forb:
            if x not in self.nodes:
                return False, f"forbidden set on unknown node {x}"
        if self.has_identity:
            e = alg.identity
            if e is None:
                return False, "identity variant needs an algebra identity"
            for x in self.nodes:
                for y in self.nodes:
                    has = self.has_label(alg, x, y, e)
                    if has != (x == y):
                        where = "missing from" if x == y else "present on"
                        return False, f"identity {where} edge ({x},{y})"
        return True, ""

    def includes(self, alg: Algebra, other: "Network") -> bool:
        """Does this network extend ``other`` (nodes, labels, forbidden)?"""
        if not set(other.nodes) <= set(self.nodes):
            return False
        for (x, y), gens in other.labels.items():
            if not all(self.has_label(alg, x, y, g) for g in gens):
                return False
        for x, (fixed, all_pos) in other.forb.items():
            mine = self.forb.get(x, _EMPTY_FORB)
            if all_pos and not mine[1]:
                return False
            if not all(self.forb_contains(alg, x, e) for e in fixed):
                return False
        return True

    # -- extension (persistent) ---------------------------------------------

    def with_node(self, alg: Algebra, name) -> "Network":
        if name in self.nodes:
            return self
        net = Network(self.nodes + (name,), self.labels, self.forb,
                      self.has_identity)
        if self.has_identity:
            net.labels[(name, name)] = frozenset([alg.identity])
        return net

    def with_label(self, alg: Algebra, x, y, e) -> "Network":
        if self.has_label(alg, x, y, e):
            return self
        keep = [g for g in self.gens(x, y) if not alg.leq(e, g)]
        net = Network(self.nodes, self.labels, self.forb, self.has_identity)
        net.labels[(x, y)] = frozenset(keep + [e])
        return net

    def with_forb(self, alg: Algebra, x, e) -> "Network":
        if self.forb_contains(alg, x, e):
            return self
        fixed, all_pos = self.forb.get(x, _EMPTY_FORB)
        net = Network(self.nodes, self.labels, self.forb, self.has_identity)
        net.forb[x] = (fixed | {e}, all_pos)
        return net

    def with_forb_all_positive(self, x) -> "Network":
        fixed, all_pos = self.forb.get(x, _EMPTY_FORB)
        if all_pos:
            return self
        net = Network(self.nodes, self.labels, self.forb, self.has_identity)
        net.forb[x] = (fixed, True)
        return net

    def fresh_node(self, stem: str = "m") -> str:
        i = len(self.nodes)
        while f"{stem}{i}" in self.nodes:
            i += 1
        return f"{stem}{i}"

    # -- value semantics ----------------------------------------------------

    def _key(self):
        return (self.nodes,
                tuple(sorted(self.labels.items())),
                tuple(sorted((x, tuple(sorted(f)), p)
                             for x, (f, p) in self.forb.items())),
                self.has_identity)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def describe(self, alg: Algebra) -> str:
        lines = ["nodes " + " ".join(self.nodes)]
        for x, y in self.labelled_pairs():
            gens = sorted(self.gens(x, y), key=alg.sort_key)
            lines.append(f"label {x} {y} " + " ".join(alg.format(g) for g in gens))
        for x in self.nodes:
            fixed, all_pos = self.forb.get(x, _EMPTY_FORB)
            if fixed or all_pos:
                parts = [alg.format(e) for e in sorted(fixed, key=alg.sort_key)]
                if all_pos:
                    parts.append("ALL+")
                lines.append(f"forb {x} " + " ".join(parts))
        return "\n".join(lines)


def parse_network(alg: Algebra, text: str,
                  has_identity: bool = True) -> Network:
    """Inverse of Network.describe.  Blank lines and '#' comments allowed;
    the nodes line must come first.  Only syntax is checked here — run
    ``well_formed`` on the result if the text is untrusted."""
    nodes = None
    labels: dict = {}
    forb: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        kind, *rest = line.split()
        if nodes is None:
            if kind != "nodes":
                raise GameError(
                    f"line {lineno}: expected a nodes line, got {kind!r}")
            if len(set(rest)) != len(rest):
                raise GameError(f"line {lineno}: duplicate node name")
            nodes = tuple(rest)
            continue
        if kind == "label":
            if len(rest) < 3:
                raise GameError(
                    f"line {lineno}: label needs two nodes and a generator")
            x, y = rest[0], rest[1]
            for node in (x, y):
                if node not in nodes:
                    raise GameError(f"line {lineno}: unknown node {node!r}")
            if (x, y) in labels:
                raise GameError(f"line {lineno}: duplicate label for ({x},{y})")
            labels[(x, y)] = frozenset(
                _parse_element(alg, g, lineno) for g in rest[2:])
        elif kind == "forb":
            if not rest:
                raise GameError(f"line {lineno}: forb needs a node")
            x = rest[0]
            if x not in nodes:
                raise GameError(f"line {lineno}: unknown node {x!r}")
            if x in forb:
                raise GameError(f"line {lineno}: duplicate forb for {x}")
            elems = rest[1:]
            all_pos = bool(elems) and elems[-1] == "ALL+"
            if all_pos:
                elems = elems[:-1]
            fixed = frozenset(_parse_element(alg, e, lineno) for e in elems)
            forb[x] = (fixed, all_pos)
        else:
            raise GameError(f"line {lineno}: unknown directive {kind!r}")
    if nodes is None:
        raise GameError("network text has no nodes line")
    return Network(nodes, labels, forb, has_identity)


def _parse_element(alg: Algebra, text: str, lineno: int):
    try:
        return alg.parse(text)
    except (KeyError, ValueError):
        raise GameError(f"line {lineno}: unknown element {text!r}") from None


# ---------------------------------------------------------------------------
# moves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Init:
    a: object
    b: object


@dataclass(frozen=True)
class Witness:
    x: str
    y: str
    a: object
    b: object


@dataclass(frozen=True)
class Demonic:
    x: str
    y: str
    z: str
    a: object
    a_plus: object
    b: object


@dataclass(frozen=True)
class Choice:
    x: str
    y: str
    z: str
    a: object
    b: object


Move = Union[Init, Witness, Demonic, Choice]


def format_move(alg: Algebra, move: Move) -> str:
    f = alg.format
    if isinstance(move, Init):
        return f"init {f(move.a)} {f(move.b)}"
    if isinstance(move, Witness):
        return f"witness {move.x} {move.y} {f(move.a)} {f(move.b)}"
    if isinstance(move, Demonic):
        return (f"demonic {move.x} {move.y} {move.z} "
                f"{f(move.a)} {f(move.a_plus)} {f(move.b)}")
    return f"choice {move.x} {move.y} {move.z} {f(move.a)} {f(move.b)}"


_MOVE_ARITY = {"init": 3, "witness": 5, "demonic": 7, "choice": 6}


def parse_move(alg: Algebra, text: str) -> Move:
    parts = text.split()
    if not parts:
        raise GameError("bad move line '': empty")
    kind = parts[0]
    want = _MOVE_ARITY.get(kind)
    if want is None:
        raise GameError(f"bad move line {text!r}: unknown kind {kind!r}")
    if len(parts) != want:
        raise GameError(f"bad move line {text!r}: {kind} takes "
                        f"{want - 1} fields, got {len(parts) - 1}")
    try:
        if kind == "init":
            return Init(alg.parse(parts[1]), alg.parse(parts[2]))
        if kind == "witness":
            return Witness(parts[1], parts[2],
                           alg.parse(parts[3]), alg.parse(parts[4]))
        if kind == "demonic":
            return Demonic(parts[1], parts[2], parts[3], alg.parse(parts[4]),
                           alg.parse(parts[5]), alg.parse(parts[6]))
        return Choice(parts[1], parts[2], parts[3],
                      alg.parse(parts[4]), alg.parse(parts[5]))
    except (ValueError, KeyError) as err:
        raise GameError(f"bad move line {text!r}: {err}") from None


def move_is_legal(alg: Algebra, net: Optional[Network], move: Move):
    """Is this a move the universal player may make here?"""
    if isinstance(move, Init):
        if net is not None:
            return False, "game already initialised"
        if alg.leq(move.a, move.b):
            return False, "initial pledge must violate the order"
        return True, ""
    if net is None:
        return False, "game not initialised"
    nodes = set(net.nodes)
    named = [getattr(move, f) for f in ("x", "y", "z") if hasattr(move, f)]
    for nd in named:
        if nd not in nodes:
            return False, f"unknown node {nd}"
    if isinstance(move, Witness):
        ab = alg.prod(move.a, move.b)
        if ab is None or not net.has_label(alg, move.x, move.y, ab):
            return False, "witness move needs the product on the edge"
        return True, ""
    if isinstance(move, Demonic):
        if not alg.leq(move.a, move.a_plus):
            return False, "demonic move needs a below a+"
        ab = alg.prod(move.a_plus, move.b)
        if ab is None or not net.has_label(alg, move.x, move.y, ab):
            return False, "demonic move needs the a+ b product on the edge"
        if not net.has_label(alg, move.x, move.z, move.a):
            return False, "demonic move needs a on the side edge"
        return True, ""
    if not net.has_label(alg, move.x, move.z, move.a):
        return False, "choice move needs a on the first leg"
    if not net.has_label(alg, move.z, move.y, move.b):
        return False, "choice move needs b on the second leg"
    return True, ""


@dataclass(frozen=True)
class MoveVerdict:
    legal: bool
    reason: str
    forall_wins: bool
    pledge: Optional[tuple]  # (x0, y0, b0) once initialised


def _find_pledge(alg: Algebra, net: Network, a, b):
    for x in net.nodes:
        for y in net.nodes:
            if net.has_label(alg, x, y, a) and not net.has_label(alg, x, y, b):
                return x, y, b
    return None


def _win_state(alg: Algebra, net: Network, pledge) -> bool:
    if pledge is not None:
        x0, y0, b0 = pledge
        if net.has_label(alg, x0, y0, b0):
            return True
    return not net.is_consistent(alg)


def apply_move(alg: Algebra, net: Optional[Network], move: Move,
               response: Network, pledge=None) -> MoveVerdict:
    """Judge the existential player's response to a move.

    The verdict carries the updated pledge (for an initial move, the first
    node pair in canonical order exhibiting it) and whether the universal
    player has won on the resulting network.
    """
    ok, why = move_is_legal(alg, net, move)
    if not ok:
        return MoveVerdict(False, f"move: {why}", False, pledge)
    ok, why = response.well_formed(alg)
    if not ok:
        return MoveVerdict(False, f"response: {why}", False, pledge)
    if net is not None and not response.includes(alg, net):
        return MoveVerdict(False, "response: drops part of the network", False,
                           pledge)

    if isinstance(move, Init):
        found = _find_pledge(alg, response, move.a, move.b)
        if found is None:
            return MoveVerdict(False,
                               "response: no edge has a without b", False, None)
        return MoveVerdict(True, "", _win_state(alg, response, found), found)

    if isinstance(move, Witness):
        if not any(response.has_label(alg, move.x, z, move.a)
                   and response.has_label(alg, z, move.y, move.b)
                   for z in response.nodes):
            return MoveVerdict(False, "response: no witnessing node", False,
                               pledge)
    elif isinstance(move, Demonic):
        if not any(response.has_label(alg, move.z, w, move.b)
                   for w in response.nodes):
            return MoveVerdict(False, "response: no continuation node", False,
                               pledge)
    else:  # Choice: accepted or rejected
        ab = alg.prod(move.a, move.b)
        accepted = ab is not None and response.has_label(alg, move.x, move.y, ab)
        rejected = any(response.has_label(alg, move.x, w, move.a)
                       and response.forb_contains(alg, w, move.b)
                       for w in response.nodes)
        if not (accepted or rejected):
            return MoveVerdict(False,
                               "response: neither accepts nor rejects", False,
                               pledge)
    return MoveVerdict(True, "", _win_state(alg, response, pledge), pledge)


# ---------------------------------------------------------------------------
# responses and move enumeration
# ---------------------------------------------------------------------------

def minimal_responses(alg: Algebra, net: Optional[Network], move: Move,
                      pledge=None, has_identity: bool = True) -> list:
    """Candidate responses: one per reuse node plus one with a fresh node
    (choice: accept plus single-fresh-node reject), all legal by
    construction modulo the identity side condition, which is checked."""
    ok, why = move_is_legal(alg, net, move)
    if not ok:
        raise GameError(f"illegal move: {why}")
    out = []

    if isinstance(move, Init):
        def consider(resp):
            if apply_move(alg, net, move, resp, pledge).legal \
                    and resp not in out:
                out.append(resp)

        base = Network(has_identity=has_identity)
        x0 = base.fresh_node()
        base = base.with_node(alg, x0)
        y0 = base.fresh_node()
        two = base.with_node(alg, y0)
        consider(two.with_label(alg, x0, y0, move.a))
        if not out:  # a = identity: the pledge must sit on a loop
            consider(base.with_label(alg, x0, x0, move.a))
        return out

    # Extending a well-formed network node-by-node keeps it well-formed
    # and answering, except that a label below the identity must not land
    # on an off-diagonal edge.
    ident = alg.identity if net.has_identity else None

    def ok_edge(x, y, e):
        return x == y or ident is None or not alg.leq(e, ident)

    def consider(resp):
        if resp not in out:
            out.append(resp)

    if isinstance(move, Witness):
        for z in net.nodes:
            if ok_edge(move.x, z, move.a) and ok_edge(z, move.y, move.b):
                consider(net.with_label(alg, move.x, z, move.a)
                            .with_label(alg, z, move.y, move.b))
        fresh = net.fresh_node()
        if ok_edge(move.x, fresh, move.a) and ok_edge(fresh, move.y, move.b):
            grown = net.with_node(alg, fresh)
            consider(grown.with_label(alg, move.x, fresh, move.a)
                          .with_label(alg, fresh, move.y, move.b))
    elif isinstance(move, Demonic):
        for w in net.nodes:
            if ok_edge(move.z, w, move.b):
                consider(net.with_label(alg, move.z, w, move.b))
        fresh = net.fresh_node()
        if ok_edge(move.z, fresh, move.b):
            grown = net.with_node(alg, fresh)
            consider(grown.with_label(alg, move.z, fresh, move.b))
    else:
        ab = alg.prod(move.a, move.b)
        if ab is not None and ok_edge(move.x, move.y, ab):
            consider(net.with_label(alg, move.x, move.y, ab))  # accept
        fresh = net.fresh_node()
        if ok_edge(move.x, fresh, move.a):
            grown = net.with_node(alg, fresh)
            consider(grown.with_label(alg, move.x, fresh, move.a)
                          .with_forb(alg, fresh, move.b))      # reject
    return out


def enumerate_moves(alg: Algebra, net: Network) -> list:
    """All legal non-initial moves, canonically ordered and deduplicated.

    Works from the (finite) label membership sets, so it applies to lazy
    word structures as well as table algebras.
    """
    seen = set()
    out = []

    def emit(move):
        if move not in seen:
            ok, _ = move_is_legal(alg, net, move)
            if ok:
                seen.add(move)
                out.append(move)

    for x, y in net.labelled_pairs():
        for w in sorted(net.members(alg, x, y), key=alg.sort_key):
            for a, b in alg.factorizations(w):
                emit(Witness(x, y, a, b))
                for aminus in alg.lower_bounds(a):
                    for z in net.nodes:
                        if net.has_label(alg, x, z, aminus):
                            emit(Demonic(x, y, z, aminus, a, b))
    for x, z in net.labelled_pairs():
        for z2, y in net.labelled_pairs():
            if z2 != z:
                continue
            for a in sorted(net.members(alg, x, z), key=alg.sort_key):
                for b in sorted(net.members(alg, z, y), key=alg.sort_key):
                    emit(Choice(x, y, z, a, b))
    return out


def _answers_in_place(alg: Algebra, net: Network, move: Move) -> bool:
    """Does the unchanged network already satisfy the response condition?"""
    if isinstance(move, Witness):
        for z in net.nodes:
            if net.has_label(alg, move.x, z, move.a) \
                    and net.has_label(alg, z, move.y, move.b):
                return True
        return False
    if isinstance(move, Demonic):
        for w in net.nodes:
            if net.has_label(alg, move.z, w, move.b):
                return True
        return False
    if isinstance(move, Choice):
        ab = alg.prod(move.a, move.b)
        if ab is not None and net.has_label(alg, move.x, move.y, ab):
            return True
        for w in net.nodes:
            if net.has_label(alg, move.x, w, move.a) \
                    and net.forb_contains(alg, w, move.b):
                return True
        return False
    return False  # an initial move always changes the (empty) network


def is_trivial(alg: Algebra, net: Network, move: Move, pledge=None) -> bool:
    """Would replaying the current (well-formed) network be a legal response?"""
    return move_is_legal(alg, net, move)[0] and _answers_in_place(alg, net, move)


# ---------------------------------------------------------------------------
# play driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GameState:
    network: Optional[Network]
    pledge: Optional[tuple]
    moves_played: int
    forall_won: bool

    @property
    def initialised(self) -> bool:
        return self.network is not None


def new_game() -> GameState:
    return GameState(None, None, 0, False)


def play(alg: Algebra, state: GameState, move: Move,
         response: Network) -> GameState:
    verdict = apply_move(alg, state.network, move, response, state.pledge)
    if not verdict.legal:
        raise GameError(verdict.reason)
    return GameState(response, verdict.pledge, state.moves_played + 1,
                     verdict.forall_wins)


def _play_fast(alg: Algebra, state: GameState, move: Move,
               response: Network) -> GameState:
    """play() without re-validation, for responses minted by
    minimal_responses against the same state."""
    if isinstance(move, Init):
        pledge = _find_pledge(alg, response, move.a, move.b)
        if pledge is None:
            raise GameError("response: no edge has a without b")
    else:
        pledge = state.pledge
    return GameState(response, pledge, state.moves_played + 1,
                     _win_state(alg, response, pledge))
