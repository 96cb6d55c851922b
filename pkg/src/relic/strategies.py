"""Scripted strategies, grid bookkeeping, and bounded game search.

Three consumers share the move machinery in ``game``:

* a universal-player script that forces a win on the lazy word structure
  whenever the play runs long enough (pledge s0;t against sn;t, walk a
  chain of witnesses up the index ladder, close with a demonic move into
  a forbidden node);
* an existential-player strategy that survives short games by keeping the
  whole network determined by a *grid* — a partial word-labelled graph
  with composition-like coherence conditions — and extending the grid
  node by node;
* a bounded search over finite algebras that either certifies a forced
  universal win (against minimal responses), saturates a play into an
  actual relational embedding, or gives up.

``verify_game_lemmas`` replays the first two against each other and
against enumerated move sequences, checking every grid invariant after
every response.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

from . import words as W
from .algebras import OrderedAlgebra
from .game import (
    Algebra,
    AnAlgebra,
    Choice,
    Demonic,
    GameError,
    GameState,
    Init,
    Move,
    Network,
    TableAlgebra,
    Witness,
    _answers_in_place,
    _play_fast,
    apply_move,
    enumerate_moves,
    format_move,
    is_trivial,
    minimal_responses,
    move_is_legal,
    new_game,
    play,
)
from .hoare import InternalCheckError
from .relations import UNDEFINED, Relation, make_space
from .represent import (
    COMPOSE_DEMONIC,
    IDENTITY_SYM,
    INCLUSION,
    EmbeddingReport,
    LawViolation,
    Representation,
    verify_embedding,
)


class StrategyExhausted(GameError):
    """A strategy was asked to act outside its guaranteed range."""


# ---------------------------------------------------------------------------
# universal player: the chain-climbing script
# ---------------------------------------------------------------------------

class LemmaLoseScript:
    """Forces a win on the word structure for n in n+2 moves.

    Stateless per call: the stage comes from the move count and every
    node role is re-resolved from the current network, so one instance
    can drive every branch of a game tree.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n

    def _chain(self, alg, net, pledge, length):
        """Nodes y_0..y_{length-1}: s_j into y_j, t onward to y_{j-1}."""
        x0, y0, _ = pledge
        out = []
        prev = y0
        for j in range(length):
            pick = next((z for z in net.nodes
                         if net.has_label(alg, x0, z, (f"s{j}",))
                         and net.has_label(alg, z, prev, ("t",))), None)
            if pick is None:
                raise InternalCheckError(
                    f"script lost its chain at stage {j}")
            out.append(pick)
            prev = pick
        return out

    def next_move(self, alg: AnAlgebra, state: GameState) -> Optional[Move]:
        n, k = self.n, state.moves_played
        if state.forall_won:
            return None
        if k == 0:
            return Init(("s0", "t"), (f"s{n}", "t"))
        x0, y0, _ = state.pledge
        net = state.network
        if k == 1:
            return Witness(x0, y0, ("s0",), ("t",))
        if k == 2:
            c0 = self._chain(alg, net, state.pledge, 1)[0]
            return Choice(x0, y0, c0, (f"s{n}",), ("t",))
        if k <= n + 1:
            i = k - 2  # witnesses for s1..s_{n-1}
            chain = self._chain(alg, net, state.pledge, i)
            return Witness(x0, chain[-1], (f"s{i}",), ("t",))
        if k == n + 2:
            chain = self._chain(alg, net, state.pledge, n)
            w = next((z for z in net.nodes
                      if net.has_label(alg, x0, z, (f"s{n}",))
                      and net.forb_contains(alg, z, ("t",))), None)
            if w is None:
                raise InternalCheckError("script found no forbidden target")
            return Demonic(x0, chain[-1], w, (f"s{n}",), (f"s{n}",), ("t",))
        return None


def forall_strategy_lemma_lose(n: int) -> LemmaLoseScript:
    return LemmaLoseScript(n)


# ---------------------------------------------------------------------------
# existential player: grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Grid:
    """Word-labelled partial graph determining a network.

    ``f`` maps node pairs to words; terminals forbid every nonempty word.
    Coherence: the diagonal is empty-labelled, defined triangles compose
    upward, every split of an edge label is realised through some node,
    and terminals have no outgoing labelled edges.
    """

    nodes: tuple
    terminals: frozenset
    f: dict


def grid_network(grid: Grid) -> Network:
    labels = {pair: frozenset([word]) for pair, word in grid.f.items()}
    forb = {x: (frozenset(), True) for x in grid.terminals}
    return Network(grid.nodes, labels, forb, has_identity=True)


def chain_grid(a: W.Word) -> Grid:
    p = len(a)
    nodes = tuple(f"g{i}" for i in range(p + 1))
    f = {(nodes[i], nodes[j]): a[i:j]
         for i in range(p + 1) for j in range(i, p + 1)}
    return Grid(nodes, frozenset(), f)


def _grid_extend(grid: Grid, new_node, new_edges, terminal=False) -> Grid:
    f = dict(grid.f)
    for pair, word in new_edges.items():
        if pair in f and f[pair] != word:
            raise InternalCheckError(
                f"grid relabels {pair}: {f[pair]} vs {word}")
        f[pair] = word
    nodes = grid.nodes if new_node is None else grid.nodes + (new_node,)
    terms = grid.terminals | ({new_node} if terminal else frozenset())
    return Grid(nodes, terms, f)


@dataclass(frozen=True)
class GridState:
    grid: Grid
    k: int  # responses made since initialisation


class GridStrategy:
    """Keeps the network grid-determined for the first n-1 rounds."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        self.n = n
        self.alg = AnAlgebra(n)

    # -- opening ------------------------------------------------------------

    def initial(self, move: Init):
        ok, why = move_is_legal(self.alg, None, move)
        if not ok:
            raise GameError(why)
        grid = chain_grid(move.a)
        return GridState(grid, 0), grid_network(grid)

    # -- responses ----------------------------------------------------------

    def respond(self, gstate: GridState, move: Move):
        if gstate.k >= self.n - 1:
            raise StrategyExhausted(
                f"grid strategy only covers the first {self.n - 1} rounds")
        alg, grid = self.alg, gstate.grid
        net = grid_network(grid)
        ok, why = move_is_legal(alg, net, move)
        if not ok:
            raise GameError(why)
        bumped = GridState(grid, gstate.k + 1)
        if apply_move(alg, net, move, net).legal:
            return bumped, net  # nothing new needed
        if isinstance(move, Witness):
            new_grid = self._extend_witness(grid, move)
        elif isinstance(move, Choice):
            new_grid = self._extend_choice(grid, move)
        elif isinstance(move, Demonic):
            raise InternalCheckError(
                "demonic move was not answerable in place")
        else:
            raise GameError("game already initialised")
        resp = grid_network(new_grid)
        if not apply_move(alg, net, move, resp).legal:
            raise InternalCheckError(
                f"grid response to {format_move(alg, move)} is illegal")
        return GridState(new_grid, gstate.k + 1), resp

    def _split_edge(self, grid: Grid, x, y, gamma, ch):
        """Find z with f(x,z)=gamma and f(z,y)=(ch,)."""
        for z in grid.nodes:
            if grid.f.get((x, z)) == gamma and grid.f.get((z, y)) == (ch,):
                return z
        raise InternalCheckError(
            f"grid has no node splitting {W.format_word(gamma)}|{ch}")

    def _fresh(self, grid: Grid) -> str:
        i = len(grid.nodes)
        while f"g{i}" in grid.nodes:
            i += 1
        return f"g{i}"

    def _hang_set(self, grid: Grid, x, source) -> set:
        # Predecessors of the attach point that also reach the new node.
        # A t-edge into x joins only when every common predecessor factors
        # through it exactly; appending to a strict order step would break
        # the triangle bound, and the transitivity-gap condition excuses
        # the skipped t-edge from needing the corner.  The move's source
        # node always joins: the response is read off its new edge.
        ins = {x, source}
        for u in grid.nodes:
            w = grid.f.get((u, x))
            if w is None or u in ins:
                continue
            if w != ("t",) or all(
                    grid.f[(p, u)] + ("t",) == grid.f[(p, x)]
                    for p in grid.nodes
                    if p != u and (p, u) in grid.f and (p, x) in grid.f):
                ins.add(u)
        return ins

    def _hang(self, grid: Grid, x, source, suffix, extra=None,
              terminal=False):
        """New node off x: f(u,new) = f(u,x)+suffix over the hang set."""
        v = self._fresh(grid)
        edges = {(v, v): W.EMPTY}
        for u in self._hang_set(grid, x, source):
            edges[(u, v)] = grid.f[(u, x)] + suffix
        for pair_from, word in (extra or {}).items():
            edges[(pair_from, v)] = word
        return v, _grid_extend(grid, v, edges, terminal=terminal)

    def _extend_witness(self, grid: Grid, move: Witness) -> Grid:
        # non-trivial only when the label is gamma.s_i, split as
        # (gamma.s_{i+1}, t); hang a fresh node off the splitting point
        w = grid.f.get((move.x, move.y))
        if w is None or len(w) == 0:
            raise InternalCheckError("witness move off the grid")
        head, last = w[:-1], w[-1]
        i = int(last[1:]) if last.startswith("s") else None
        if (i is None or i >= self.n or move.b != ("t",)
                or move.a != head + (f"s{i + 1}",)):
            raise InternalCheckError(
                f"unexpected witness shape {format_move(self.alg, move)} "
                f"over {W.format_word(w)}")
        x = self._split_edge(grid, move.x, move.y, head, last)
        nxt = f"s{i + 1}"
        if any(grid.f.get((x, z)) == (nxt,) for z in grid.nodes):
            raise InternalCheckError(
                f"grid already extends {x} by {nxt}")
        v, grid = self._hang(grid, x, move.x, (nxt,))
        return _grid_extend(grid, None, {(v, move.y): ("t",)})

    def _extend_choice(self, grid: Grid, move: Choice) -> Grid:
        alpha = move.a
        fxz = grid.f.get((move.x, move.z))
        if fxz is None:
            raise InternalCheckError("choice move off the grid")
        if fxz == alpha:
            # only reachable when (x,y) has no label, forcing alpha = t
            if alpha != ("t",) or (move.x, move.y) in grid.f:
                raise InternalCheckError(
                    f"unexpected choice shape {format_move(self.alg, move)}")
            _, grid = self._hang(grid, move.x, move.x, ("t",), terminal=True)
            return grid
        # alpha strictly above f(x,z): rewrite happened on the last char
        head, last = fxz[:-1], fxz[-1]
        x = self._split_edge(grid, move.x, move.z, head, last)
        if alpha == head + (f"s{self.n}",):
            if last != "s0":
                raise InternalCheckError("jump without an s0 edge")
            _, grid = self._hang(grid, x, move.x, (f"s{self.n}",),
                                 terminal=True)
            return grid
        i = int(last[1:]) if last.startswith("s") else None
        if i is None or i >= self.n or alpha != head + (f"s{i + 1}", "t"):
            raise InternalCheckError(
                f"unexpected choice shape {format_move(self.alg, move)} "
                f"over {W.format_word(fxz)}")
        nxt = f"s{i + 1}"
        v = next((z for z in grid.nodes if grid.f.get((x, z)) == (nxt,)), None)
        if v is None:
            v, grid = self._hang(grid, x, move.x, (nxt,))
            grid = _grid_extend(grid, None, {(v, move.z): ("t",)})
        _, grid = self._hang(grid, x, move.x, (nxt, "t"),
                             extra={v: ("t",)}, terminal=True)
        return grid


def exists_strategy_grid(n: int) -> GridStrategy:
    return GridStrategy(n)


# ---------------------------------------------------------------------------
# grid invariants
# ---------------------------------------------------------------------------

def check_grid(n: int, grid: Grid) -> list:
    """Coherence conditions of a grid; empty list when all hold."""
    bad = []
    f = grid.f
    for x in grid.nodes:
        if f.get((x, x)) != W.EMPTY:
            bad.append(f"diagonal of {x} is not the empty word")
    for (x, y), w in f.items():
        if (w == W.EMPTY) != (x == y):
            bad.append(f"empty-word edge condition fails at ({x},{y})")
    for (x, y), wxy in f.items():
        for z in grid.nodes:
            wyz = f.get((y, z))
            wxz = f.get((x, z))
            if wyz is not None and wxz is not None \
                    and not W.an_leq(n, wxz, wxy + wyz):
                bad.append(f"triangle ({x},{y},{z}) does not compose upward")
    for (x, y), w in f.items():
        for m in range(len(w) + 1):
            if not any(f.get((x, z)) == w[:m] and f.get((z, y)) == w[m:]
                       for z in grid.nodes):
                bad.append(
                    f"split {W.format_word(w[:m])}|{W.format_word(w[m:])} "
                    f"of ({x},{y}) has no midpoint")
    for x in grid.terminals:
        for y in grid.nodes:
            if y != x and (x, y) in f:
                bad.append(f"terminal {x} has an outgoing edge to {y}")
    return bad


def check_grid_network(grid: Grid, net: Network) -> list:
    want = grid_network(grid)
    return [] if net == want else ["network is not grid-determined"]


def check_hypotheses(n: int, grid: Grid, k: int) -> list:
    """Induction-style structural facts carried between rounds."""
    bad = []
    f = grid.f
    nodes = grid.nodes
    for x, y in f:
        for z in nodes:
            if (y, z) in f and (x, z) not in f and f[(x, y)] != ("t",):
                bad.append(
                    f"undefined corner ({x},{z}) behind non-t edge ({x},{y})")
    for x in nodes:
        for z in nodes:
            for w in nodes:
                if z == w or (x, z) not in f or (x, w) not in f:
                    continue
                if not W.an_leq(n, f[(x, z)], f[(x, w)]):
                    continue
                if any((x, y) in f and (w, y) in f and f[(w, y)] != W.EMPTY
                       for y in nodes):
                    bad.append(
                        f"order-related out-edges {x}->{z},{x}->{w} "
                        "despite a continuing target")
    single = {}
    for (x, y), w in f.items():
        if len(w) == 1 and w[0].startswith("s"):
            single.setdefault((x, int(w[0][1:])), []).append(y)
    for (x, i), ys in single.items():
        if len(ys) > 1:
            bad.append(f"two s{i} edges out of {x}: {sorted(ys)}")
    for (x, i), ys in single.items():
        for (x2, j), zs in single.items():
            if x2 != x or j <= i:
                continue
            okA = j - i <= k and any(
                f.get((x, v)) == (f"s{i + 1}",) and f.get((v, ys[0])) == ("t",)
                for v in nodes)
            okB = j == n and all(z in grid.terminals for z in zs) and any(
                f.get((x, v)) == ("s0",) for v in nodes)
            if not (okA or okB):
                bad.append(
                    f"ladder gap at {x}: s{i} and s{j} coexist "
                    f"without support (round {k})")
    return bad


# ---------------------------------------------------------------------------
# lemma verification
# ---------------------------------------------------------------------------

@dataclass
class _Counter:
    nodes: int = 0
    leaves: int = 0
    max_rounds: int = 0
    limit: Optional[int] = None

    def spent(self) -> bool:
        return self.limit is not None and self.nodes >= self.limit


@dataclass(frozen=True)
class GameLemmasReport:
    n: int
    script_won: bool
    script_leaves: int
    script_max_rounds: int
    grid_mode: str
    grid_sequences: int
    grid_checks: int
    violations: tuple
    inconclusive: bool

    @property
    def ok(self) -> bool:
        return self.script_won and not self.violations and not self.inconclusive

    def summary(self) -> str:
        lines = [
            f"word structure n={self.n}",
            f"forced loss: {'proved' if self.script_won else 'FAILED'} "
            f"({self.script_leaves} leaves, {self.script_max_rounds} rounds)",
            f"survival: {self.grid_mode}, {self.grid_sequences} sequences, "
            f"{self.grid_checks} responses checked",
        ]
        if self.violations:
            lines.append(f"{len(self.violations)} violation(s):")
            lines.extend("  " + v for v in self.violations[:20])
        else:
            lines.append("no violations")
        if self.inconclusive:
            lines.append("budget exhausted: report is partial")
        return "\n".join(lines)


def _script_forces_win(alg, script, state, limit_moves, stats) -> bool:
    stats.nodes += 1
    if state.forall_won:
        stats.leaves += 1
        stats.max_rounds = max(stats.max_rounds, state.moves_played - 1)
        return True
    if stats.spent() or state.moves_played > limit_moves:
        stats.leaves += 1
        return False
    move = script.next_move(alg, state)
    if move is None:
        stats.leaves += 1
        return False
    resps = minimal_responses(alg, state.network, move, state.pledge)
    if not resps:
        stats.leaves += 1
        stats.max_rounds = max(stats.max_rounds, state.moves_played)
        return True  # no legal response at all
    return all(
        _script_forces_win(alg, script, play(alg, state, move, r),
                           limit_moves, stats)
        for r in resps)


def _grid_invariants(n, gstate, net, state, trail) -> list:
    out = []
    for msg in itertools.chain(
            check_grid(n, gstate.grid),
            check_grid_network(gstate.grid, net),
            check_hypotheses(n, gstate.grid, gstate.k)):
        out.append(f"{trail}: {msg}")
    if state.forall_won:
        out.append(f"{trail}: existential player lost inside the contract")
    return out


def _grid_explore(n, strat, alg, gstate, state, depth_left, stats,
                  violations, trail):
    if depth_left <= 0 or stats.spent():
        return
    for move in enumerate_moves(alg, state.network):
        if stats.spent():
            return
        stats.nodes += 1
        try:
            new_gs, resp = strat.respond(gstate, move)
        except (GameError, InternalCheckError) as err:
            violations.append(
                f"{trail} / {format_move(alg, move)}: {err}")
            continue
        here = f"{trail} / {format_move(alg, move)}"
        if resp == state.network:
            continue  # answered in place: same position, nothing new to check
        try:
            child = play(alg, state, move, resp)
        except GameError as err:
            violations.append(f"{here}: illegal response ({err})")
            continue
        violations.extend(_grid_invariants(n, new_gs, resp, child, here))
        _grid_explore(n, strat, alg, new_gs, child, depth_left - 1, stats,
                      violations, here)


def _grid_sample(n, strat, alg, inits, depth, samples, seed, stats,
                 violations):
    rng = random.Random(seed)
    done = 0
    while done < samples and not stats.spent():
        a = rng.choice(inits)
        move = Init(a, a + ("t",))
        gstate, net = strat.initial(move)
        state = play(alg, new_game(), move, net)
        trail = f"init {W.format_word(a)}"
        violations.extend(_grid_invariants(n, gstate, net, state, trail))
        for _ in range(depth):
            moves = [m for m in enumerate_moves(alg, state.network)
                     if not is_trivial(alg, state.network, m, state.pledge)]
            if not moves:
                break
            move = rng.choice(moves)
            stats.nodes += 1
            here = f"{trail} / {format_move(alg, move)}"
            try:
                gstate, resp = strat.respond(gstate, move)
                state = play(alg, state, move, resp)
            except (GameError, InternalCheckError) as err:
                violations.append(f"{here}: {err}")
                break
            violations.extend(_grid_invariants(n, gstate, resp, state, here))
            trail = here
        done += 1
    return done


def verify_game_lemmas(n: int, samples: int = 10_000, seed: int = 0,
                       init_len: int = 2,
                       budget: Optional[int] = None) -> GameLemmasReport:
    """Replay both structural facts about the word structure for n.

    The forced-loss half runs the scripted universal player against every
    minimal response and demands a win within n+2 rounds.  The survival
    half drives the grid strategy through move sequences of length n-2:
    exhaustively for n <= 4, by seeded sampling above that.  Every grid
    response is re-checked against the grid coherence conditions and the
    carried structural facts.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    alg = AnAlgebra(n)
    script = forall_strategy_lemma_lose(n)

    a_stats = _Counter(limit=budget)
    won = _script_forces_win(alg, script, new_game(), n + 3, a_stats)

    b_stats = _Counter(limit=budget)
    violations: list = []
    inits = sorted(W.words_up_to(n, init_len), key=lambda w: (len(w), w))
    depth = max(0, n - 2)
    if n <= 4:
        mode = "exhaustive"
        sequences = 0
        for a in inits:
            if b_stats.spent():
                break
            move = Init(a, a + ("t",))
            strat = exists_strategy_grid(n)
            gstate, net = strat.initial(move)
            state = play(alg, new_game(), move, net)
            trail = f"init {W.format_word(a)}"
            violations.extend(_grid_invariants(n, gstate, net, state, trail))
            _grid_explore(n, strat, alg, gstate, state, depth, b_stats,
                          violations, trail)
            sequences += 1
    else:
        mode = "sampled"
        strat = exists_strategy_grid(n)
        sequences = _grid_sample(n, strat, alg, inits, depth, samples, seed,
                                 b_stats, violations)

    return GameLemmasReport(
        n=n, script_won=won, script_leaves=a_stats.leaves,
        script_max_rounds=a_stats.max_rounds, grid_mode=mode,
        grid_sequences=sequences, grid_checks=b_stats.nodes,
        violations=tuple(violations),
        inconclusive=a_stats.spent() or b_stats.spent())


# ---------------------------------------------------------------------------
# bounded search on finite algebras
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WinTree:
    """Certificate: a move and a winning subtree per minimal response."""
    move: Optional[Move]
    branches: tuple  # ((network, subtree), ...); empty at won leaves

    def depth(self) -> int:
        if self.move is None:
            return 0
        return 1 + max((b.depth() for _, b in self.branches), default=0)

    def size(self) -> int:
        return 1 + sum(b.size() for _, b in self.branches)


@dataclass(frozen=True)
class SearchVerdict:
    kind: str  # "not-representable" | "saturated" | "unknown"
    init: Optional[tuple]        # element names of the refuted pair
    tree: Optional[WinTree]
    representation: Optional[Representation]
    embedding: Optional[EmbeddingReport]
    notes: tuple
    nodes_explored: int
    inconclusive: bool

    def summary(self) -> str:
        if self.kind == "not-representable":
            a, b = self.init
            return (f"not representable: pledging {b} against {a} wins in "
                    f"{self.tree.depth() - 1} rounds after the opening "
                    f"({self.tree.size()} tree nodes)")
        if self.kind == "saturated":
            return "representation extracted from saturated plays: verified"
        extra = "; ".join(self.notes)
        return "inconclusive" + (f" ({extra})" if extra else "")


def _move_score(galg, net, pledge, move) -> int:
    if isinstance(move, Demonic):
        if net.forb_contains(galg, move.z, move.b):
            return 0  # every continuation lands in a forbidden set
        return 4
    if isinstance(move, Choice):
        ab = galg.prod(move.a, move.b)
        if ab is None:
            return 1  # cannot be accepted, so the forbidden sets grow
        if pledge is not None:
            x0, y0, b0 = pledge
            if (move.x, move.y) == (x0, y0) and galg.leq(ab, b0):
                return 1  # accepting would finish the game
        return 3
    return 2


def _search_win(galg, state, depth, stats, memo) -> Optional[WinTree]:
    if state.forall_won:
        return WinTree(None, ())
    if depth == 0 or stats.spent():
        return None
    key = (state.network, state.pledge, depth)
    if key in memo:
        return memo[key]
    net, pledge = state.network, state.pledge
    moves = [m for m in enumerate_moves(galg, net)
             if not _answers_in_place(galg, net, m)]
    moves.sort(key=lambda m: _move_score(galg, net, pledge, m))
    result = None
    for move in moves:
        stats.nodes += 1
        if stats.spent():
            break
        resps = minimal_responses(galg, net, move, pledge)
        if not resps:
            result = WinTree(move, ())
            break
        branches = []
        for resp in resps:
            sub = _search_win(galg, _play_fast(galg, state, move, resp),
                              depth - 1, stats, memo)
            if sub is None:
                branches = None
                break
            branches.append((resp, sub))
        if branches is not None:
            result = WinTree(move, tuple(branches))
            break
    # a "no win" concluded after the budget ran out is not a proof
    if result is not None or not stats.spent():
        memo[key] = result
    return result


def _saturate(galg, state, stats, max_steps):
    """Greedy survival play; returns (status, final state).

    Budget is charged per enumerated move, so runaway networks (whose
    move lists grow quadratically) cut off early rather than by stalling."""
    for _ in range(max_steps):
        if stats.spent():
            return "budget", state
        moves = [m for m in enumerate_moves(galg, state.network)
                 if not _answers_in_place(galg, state.network, m)]
        if not moves:
            return "saturated", state
        move = moves[0]
        stats.nodes += 1 + len(moves)
        nxt = None
        for resp in minimal_responses(galg, state.network, move,
                                      state.pledge):
            child = _play_fast(galg, state, move, resp)
            if not child.forall_won:
                nxt = child
                break
        if nxt is None:
            return "lost", state
        state = nxt
    return "budget", state


def _theta(alg: OrderedAlgebra, nets, with_identity):
    """Read a representation off saturated networks (disjoint union)."""
    names = []
    offset = []
    for idx, net in enumerate(nets):
        offset.append(len(names))
        names.extend(f"p{idx}.{x}" for x in net.nodes)
    space = make_space(names)
    galg = TableAlgebra(alg)
    images = []
    for e in range(alg.size):
        pairs = set()
        for idx, net in enumerate(nets):
            base = offset[idx]
            pos = {x: base + i for i, x in enumerate(net.nodes)}
            for x, y in itertools.product(net.nodes, repeat=2):
                if net.has_label(galg, x, y, e):
                    pairs.add((pos[x], pos[y]))
        images.append(Relation(space, pairs))
    sig = {INCLUSION}
    if with_identity:
        sig.add(IDENTITY_SYM)
    if not alg.is_partial:
        sig.add(COMPOSE_DEMONIC)
    return Representation(alg, space, tuple(images), frozenset(sig))


def _partial_product_check(rep: Representation):
    alg = rep.source
    for i in range(alg.size):
        for j in range(alg.size):
            k = alg.prod(i, j)
            if k is UNDEFINED:
                continue
            if rep.map[i].compose_demonic(rep.map[j]) != rep.map[k]:
                yield LawViolation(
                    "preserve-partial-*", (alg.names[i], alg.names[j]),
                    "image product differs from image of the product")


def bounded_nonrep_search(alg: OrderedAlgebra, depth: int,
                          with_identity: Optional[bool] = None,
                          budget: int = 200_000,
                          saturate_steps: int = 400) -> SearchVerdict:
    """Decide what bounded game play says about representability.

    For every order violation a !<= b the universal player searches for a
    win within ``depth`` rounds against minimal responses; any success is
    returned as a certificate tree.  Failing that, a greedy survival play
    is run per violation, and if every play settles (no move changes the
    network) the label sets are read back as relations and checked as an
    embedding.  Everything else is Unknown.  A certificate only refutes
    representations reachable through minimal responses; the verdict notes
    record that caveat.

    ``budget`` caps the nodes of each individual search attempt (one per
    opening response) and each survival play, so a barren opening cannot
    starve the rest; ``nodes_explored`` reports the grand total.
    """
    if with_identity is None:
        with_identity = alg.identity is not None
    if with_identity and alg.identity is None:
        raise GameError("identity variant needs an algebra identity")
    galg = TableAlgebra(alg)
    pairs = [(i, j) for i in range(alg.size) for j in range(alg.size)
             if not alg.le(i, j)]
    notes = ("certificate is relative to minimal responses",)
    total = 0
    truncated = False

    if not pairs:
        # one-element algebras: a single reflexive point embeds them
        space = make_space(("x",))
        images = tuple(Relation(space, {(0, 0)}) for _ in range(alg.size))
        sig = {INCLUSION} | ({IDENTITY_SYM} if with_identity else set())
        if not alg.is_partial:
            sig.add(COMPOSE_DEMONIC)
        rep = Representation(alg, space, images, frozenset(sig))
        return SearchVerdict("saturated", None, None, rep,
                             verify_embedding(rep), (), 0, False)

    # Pledges around elements that arise as products of non-units give the
    # universal player material to work with (accepted choices can land on
    # the pledged element), so those openings go first.
    reach = set()
    for u in range(alg.size):
        for v in range(alg.size):
            if u == alg.identity or v == alg.identity:
                continue
            k = galg.prod(u, v)
            if k is not None:
                reach.add(k)
    order = sorted(pairs,
                   key=lambda ij: (ij[1] not in reach, ij[0] not in reach, ij))

    memo: dict = {}
    for i, j in order:
        move = Init(i, j)
        for resp in minimal_responses(galg, None, move,
                                      has_identity=with_identity):
            stats = _Counter(limit=budget)
            state = play(galg, new_game(), move, resp)
            tree = _search_win(galg, state, depth, stats, memo)
            total += stats.nodes
            truncated = truncated or stats.spent()
            if tree is not None:
                return SearchVerdict(
                    "not-representable", (alg.names[i], alg.names[j]),
                    WinTree(move, ((resp, tree),)), None, None, notes,
                    total, False)
    if truncated:
        notes = notes + ("win search truncated by budget",)

    finals = []
    for i, j in pairs:
        move = Init(i, j)
        resps = minimal_responses(galg, None, move,
                                  has_identity=with_identity)
        if not resps:
            return SearchVerdict("unknown", (alg.names[i], alg.names[j]),
                                 None, None, None,
                                 notes + ("no opening response",),
                                 total, True)
        stats = _Counter(limit=budget)
        status, state = _saturate(galg, play(galg, new_game(), move,
                                             resps[0]), stats, saturate_steps)
        total += stats.nodes
        if status != "saturated":
            why = ("survival play lost" if status == "lost"
                   else "saturation budget exhausted")
            return SearchVerdict("unknown", (alg.names[i], alg.names[j]),
                                 None, None, None, notes + (why,),
                                 total, True)
        finals.append(state.network)

    rep = _theta(alg, finals, with_identity)
    report = verify_embedding(rep)
    if alg.is_partial:
        extra = tuple(_partial_product_check(rep))
        report = EmbeddingReport(tuple(sorted(
            report.violations + extra,
            key=lambda v: (v.law, v.witness, v.detail))))
    if report.ok:
        return SearchVerdict("saturated", None, None, rep, report, (),
                             total, False)
    return SearchVerdict("unknown", None, None, rep, report,
                         notes + ("saturated plays do not embed",),
                         total, True)


# ---------------------------------------------------------------------------
# finite fragments of the word structure
# ---------------------------------------------------------------------------

def truncated_an_algebra(n: int) -> OrderedAlgebra:
    """The words reachable in a forced-loss play, as a partial algebra.

    Carrier: the empty word, t, each s_i, and each s_i;t.  Products are
    concatenations that stay inside the carrier; the order is inherited.
    """
    words = [W.EMPTY, ("t",)]
    words += [(f"s{i}",) for i in range(n + 1)]
    words += [(f"s{i}", "t") for i in range(n + 1)]
    index = {w: i for i, w in enumerate(words)}
    names = tuple(W.format_word(w) for w in words)
    product = [[index.get(a + b) for b in words] for a in words]
    leq = [[W.an_leq(n, a, b) for b in words] for a in words]
    return OrderedAlgebra(names, product, leq, identity=index[W.EMPTY],
                          partial=True)
