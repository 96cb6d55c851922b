"""Representation game: networks, moves, strategies, bounded search."""

import pytest

from relic import words as W
from relic.algebras import OrderedAlgebra
from relic.game import (
    AnAlgebra,
    Choice,
    Demonic,
    GameError,
    Init,
    Network,
    TableAlgebra,
    Witness,
    apply_move,
    enumerate_moves,
    format_move,
    is_trivial,
    minimal_responses,
    move_is_legal,
    new_game,
    parse_move,
    play,
)
from relic.strategies import (
    Grid,
    StrategyExhausted,
    bounded_nonrep_search,
    chain_grid,
    check_grid,
    check_grid_network,
    check_hypotheses,
    exists_strategy_grid,
    forall_strategy_lemma_lose,
    grid_network,
    truncated_an_algebra,
    verify_game_lemmas,
)

S0T, S3T = ("s0", "t"), ("s3", "t")


def two_monoid():
    # {e, a} with a idempotent, discrete order: plainly representable
    return OrderedAlgebra(
        ("e", "a"), ((0, 1), (1, 1)), ((True, False), (False, True)),
        identity=0,
    )


def opening(n=3):
    alg = AnAlgebra(n)
    move = Init(S0T, (f"s{n}", "t"))
    net = minimal_responses(alg, None, move)[0]
    return alg, play(alg, new_game(), move, net)


class TestNetwork:
    def test_identity_loops_added_with_nodes(self):
        alg = AnAlgebra(2)
        net = Network(has_identity=True).with_node(alg, "x")
        assert net.gens("x", "x") == {W.EMPTY}
        assert net.well_formed(alg) == (True, "")

    def test_labels_are_minimal_antichains(self):
        alg = AnAlgebra(2)
        net = Network(has_identity=False).with_node(alg, "x").with_node(alg, "y")
        one = net.with_label(alg, "x", "y", ("s0",)).with_label(alg, "x", "y", ("s2",))
        other = net.with_label(alg, "x", "y", ("s2",)).with_label(alg, "x", "y", ("s0",))
        # s0 <= s2, so the dominated generator never survives
        assert one.gens("x", "y") == {("s0",)}
        assert one == other
        assert one.has_label(alg, "x", "y", ("s2",))
        assert not one.has_label(alg, "x", "y", ("t",))

    def test_members_is_union_of_cones(self):
        alg = AnAlgebra(3)
        net = Network(has_identity=False).with_node(alg, "x").with_node(alg, "y")
        net = net.with_label(alg, "x", "y", ("s0",)).with_label(alg, "x", "y", ("t",))
        assert net.members(alg, "x", "y") == {("s0",), ("s3",), ("s1", "t"), ("t",)}

    def test_forbidden_sets_drive_consistency(self):
        alg = AnAlgebra(2)
        net = Network(has_identity=False).with_node(alg, "x").with_node(alg, "y")
        net = net.with_label(alg, "x", "y", ("t",)).with_forb(alg, "y", ("t",))
        assert net.is_consistent(alg)
        bad = net.with_forb(alg, "x", ("t",))
        assert bad.first_inconsistency(alg) == ("x", "y", ("t",))

    def test_all_positive_forb_spares_only_identity(self):
        alg = AnAlgebra(2)
        net = Network(has_identity=True).with_node(alg, "x")
        net = net.with_forb_all_positive("x")
        assert net.forb_contains(alg, "x", ("t",))
        assert net.forb_contains(alg, "x", ("s1", "s0"))
        assert not net.forb_contains(alg, "x", W.EMPTY)

    def test_includes_is_membership_not_generator_equality(self):
        alg = AnAlgebra(2)
        base = Network(has_identity=False).with_node(alg, "x").with_node(alg, "y")
        weak = base.with_label(alg, "x", "y", ("s2",))
        strong = base.with_label(alg, "x", "y", ("s0",))
        assert strong.includes(alg, weak)   # s0 <= s2: the member is kept
        assert not weak.includes(alg, strong)


class TestMoveText:
    @pytest.mark.parametrize("line", [
        "init s0t s2t",
        "witness m0 m1 s0 t",
        "demonic g0 g2 g1 s0 s2 t",
        "choice m0 m1 m0 s2 t",
        "init ^ t",
    ])
    def test_round_trip(self, line):
        alg = AnAlgebra(2)
        assert format_move(alg, parse_move(alg, line)) == line

    def test_parse_rejections(self):
        alg = AnAlgebra(2)
        with pytest.raises(GameError, match="witness takes 4 fields, got 2"):
            parse_move(alg, "witness m0 m1")
        with pytest.raises(GameError, match="unknown kind 'frobnicate'"):
            parse_move(alg, "frobnicate x")
        with pytest.raises(GameError, match="bad character 's9'"):
            parse_move(alg, "witness a b s9 t")
        with pytest.raises(GameError, match="empty"):
            parse_move(alg, "   ")

    def test_table_algebra_round_trip(self):
        galg = TableAlgebra(two_monoid())
        line = "choice x y z a e"
        assert format_move(galg, parse_move(galg, line)) == line


class TestApplyMove:
    def test_opening_pledge(self):
        alg, state = opening()
        assert state.network.nodes == ("m0", "m1")
        assert state.network.gens("m0", "m1") == {S0T}
        assert state.pledge == ("m0", "m1", S3T)
        assert not state.forall_won

    def test_opening_needs_an_order_violation(self):
        alg = AnAlgebra(3)
        ok, why = move_is_legal(alg, None, Init(("s0",), ("s3",)))
        assert not ok and "violate the order" in why

    def test_frozen_rejection_reasons(self):
        alg, state = opening()
        net = state.network
        cases = [
            (Init(("s0",), ("t",)), net, "game already initialised"),
            (Witness("m0", "m1", ("t",), ("t",)), net,
             "witness move needs the product on the edge"),
            (Witness("m0", "m9", ("s0",), ("t",)), net, "unknown node m9"),
            (Witness("m0", "m1", ("s0",), ("t",)),
             Network(has_identity=True).with_node(alg, "m0").with_node(alg, "m1"),
             "drops part of the network"),
            (Witness("m0", "m1", ("s0",), ("t",)),
             net.with_label(alg, "m1", "m0", W.EMPTY),
             "identity present on edge (m1,m0)"),
            (Witness("m0", "m1", ("s0",), ("t",)),
             net.with_label(alg, "m0", "m0", ("s1",)), "no witnessing node"),
        ]
        for move, resp, fragment in cases:
            verdict = apply_move(alg, net, move, resp, state.pledge)
            assert not verdict.legal
            assert fragment in verdict.reason

    def test_accepted_choice_on_the_pledge_wins(self):
        alg, state = opening()
        net = state.network.with_label(alg, "m0", "m0", ("s0",)) \
                           .with_label(alg, "m0", "m1", ("t",))
        state = play(alg, state, Witness("m0", "m1", ("s0",), ("t",)), net)
        move = Choice("m0", "m1", "m0", ("s3",), ("t",))
        accept = net.with_label(alg, "m0", "m1", S3T)
        verdict = apply_move(alg, net, move, accept, state.pledge)
        assert verdict.legal and verdict.forall_wins

    def test_play_raises_on_illegal(self):
        alg, state = opening()
        smaller = Network(has_identity=True).with_node(alg, "m0")
        with pytest.raises(GameError, match="drops part of the network"):
            play(alg, state, Witness("m0", "m1", ("s0",), ("t",)), smaller)


class TestMinimalResponses:
    def test_opening_has_one_two_node_response(self):
        alg = AnAlgebra(3)
        resps = minimal_responses(alg, None, Init(S0T, S3T))
        assert len(resps) == 1
        assert resps[0].nodes == ("m0", "m1")

    def test_opening_on_identity_falls_back_to_a_loop(self):
        alg = AnAlgebra(3)
        resps = minimal_responses(alg, None, Init(W.EMPTY, ("t",)))
        assert len(resps) == 1
        net = resps[0]
        assert net.nodes == ("m0",)
        state = play(alg, new_game(), Init(W.EMPTY, ("t",)), net)
        assert state.pledge == ("m0", "m0", ("t",))

    def test_witness_reuse_both_nodes_plus_fresh(self):
        alg, state = opening()
        move = Witness("m0", "m1", ("s0",), ("t",))
        resps = minimal_responses(alg, state.network, move, state.pledge)
        assert len(resps) == 3
        assert resps[0].gens("m0", "m0") == {W.EMPTY, ("s0",)}
        assert resps[1].gens("m1", "m1") == {W.EMPTY, ("t",)}
        assert resps[2].nodes == ("m0", "m1", "m2")
        assert resps[2].gens("m0", "m2") == {("s0",)}
        assert resps[2].gens("m2", "m1") == {("t",)}

    def test_choice_accept_then_single_fresh_reject(self):
        alg, state = opening()
        net = state.network.with_label(alg, "m0", "m0", ("s0",)) \
                           .with_label(alg, "m0", "m1", ("t",))
        state = play(alg, state, Witness("m0", "m1", ("s0",), ("t",)), net)
        move = Choice("m0", "m1", "m0", ("s3",), ("t",))
        resps = minimal_responses(alg, net, move, state.pledge)
        assert len(resps) == 2
        accept, reject = resps
        assert accept.has_label(alg, "m0", "m1", S3T)
        assert play(alg, state, move, accept).forall_won
        assert reject.nodes[-1] == "m2"
        assert reject.gens("m0", "m2") == {("s3",)}
        assert reject.forb_contains(alg, "m2", ("t",))
        assert not play(alg, state, move, reject).forall_won

    def test_illegal_move_raises(self):
        alg, state = opening()
        with pytest.raises(GameError, match="illegal move"):
            minimal_responses(alg, state.network,
                              Witness("m0", "m1", ("t",), ("t",)), state.pledge)

    def test_triviality_matches_in_place_answers(self):
        alg, state = opening()
        net = state.network
        # the identity split is answered by the nodes already present
        assert is_trivial(alg, net, Witness("m0", "m1", W.EMPTY, S0T),
                          state.pledge)
        assert not is_trivial(alg, net, Witness("m0", "m1", ("s0",), ("t",)),
                              state.pledge)


class TestEnumerateMoves:
    def test_moves_are_legal_unique_and_cover_kinds(self):
        alg, state = opening()
        net = state.network.with_label(alg, "m0", "m0", ("s0",)) \
                           .with_label(alg, "m0", "m1", ("t",))
        moves = enumerate_moves(alg, net)
        assert len(moves) == len(set(moves))
        kinds = {type(m) for m in moves}
        assert kinds == {Witness, Demonic, Choice}
        for m in moves:
            ok, why = move_is_legal(alg, net, m)
            assert ok, (format_move(alg, m), why)

    def test_table_algebra_tables_match_brute_force(self):
        alg = truncated_an_algebra(2)
        galg = TableAlgebra(alg)
        n = alg.size
        for w in range(n):
            brute = [(a, b) for a in range(n) for b in range(n)
                     if alg.prod(a, b) == w]
            assert list(galg.factorizations(w)) == brute
        for a in range(n):
            assert galg.upclose(a) == {b for b in range(n) if alg.le(a, b)}
            assert galg.lower_bounds(a) == tuple(
                b for b in range(n) if alg.le(b, a))


class TestLemmaScript:
    def test_script_reaches_the_winning_choice(self):
        alg, state = opening()
        script = forall_strategy_lemma_lose(3)
        m1 = script.next_move(alg, state)
        assert m1 == Witness("m0", "m1", ("s0",), ("t",))
        state = play(alg, state, m1,
                     minimal_responses(alg, state.network, m1, state.pledge)[0])
        m2 = script.next_move(alg, state)
        assert isinstance(m2, Choice)
        accept = minimal_responses(alg, state.network, m2, state.pledge)[0]
        assert play(alg, state, m2, accept).forall_won

    @pytest.mark.parametrize("n,leaves,rounds", [(1, 12, 3), (2, 43, 4),
                                                 (3, 167, 5)])
    def test_script_beats_every_minimal_response(self, n, leaves, rounds):
        report = verify_game_lemmas(n, samples=0)
        assert report.script_won
        assert report.script_leaves == leaves
        assert report.script_max_rounds == rounds == n + 2


class TestGrid:
    def test_chain_grid_shape(self):
        g = chain_grid(W.parse_word(3, "s0s0"))
        assert g.nodes == ("g0", "g1", "g2")
        assert g.terminals == frozenset()
        assert g.f[("g0", "g2")] == ("s0", "s0")
        assert g.f[("g1", "g2")] == ("s0",)
        assert g.f[("g0", "g0")] == W.EMPTY
        assert check_grid(3, g) == []
        assert check_hypotheses(3, g, 0) == []

    def test_grid_network_reads_off_f_and_terminals(self):
        g = chain_grid(W.parse_word(3, "s0"))
        net = grid_network(g)
        assert net.gens("g0", "g1") == {("s0",)}
        assert net.gens("g0", "g0") == {W.EMPTY}
        assert check_grid_network(g, net) == []
        assert check_grid_network(g, net.with_label(
            AnAlgebra(3), "g1", "g0", ("t",))) == ["network is not grid-determined"]

    def test_checker_flags_broken_triangles(self):
        g = Grid(nodes=("g0", "g1", "g2"), terminals=frozenset(),
                 f={("g0", "g0"): W.EMPTY, ("g1", "g1"): W.EMPTY,
                    ("g2", "g2"): W.EMPTY, ("g0", "g1"): ("s1",),
                    ("g1", "g2"): ("t", "s1"), ("g0", "g2"): ("s0", "s1")})
        found = check_grid(4, g)
        assert "triangle (g0,g1,g2) does not compose upward" in found

    def test_checker_flags_missing_midpoints_and_terminals(self):
        g = Grid(nodes=("g0", "g1"), terminals=frozenset(),
                 f={("g0", "g0"): W.EMPTY, ("g1", "g1"): W.EMPTY,
                    ("g0", "g1"): ("s0", "s0")})
        assert "split s0|s0 of (g0,g1) has no midpoint" in check_grid(3, g)
        t = Grid(nodes=("g0", "g1"), terminals=frozenset({"g0"}),
                 f={("g0", "g0"): W.EMPTY, ("g1", "g1"): W.EMPTY,
                    ("g0", "g1"): ("t",)})
        assert "terminal g0 has an outgoing edge to g1" in check_grid(3, t)

    def test_hypotheses_flag_duplicate_ladder_edges(self):
        g = Grid(nodes=("g0", "g1", "g2"), terminals=frozenset(),
                 f={("g0", "g0"): W.EMPTY, ("g1", "g1"): W.EMPTY,
                    ("g2", "g2"): W.EMPTY, ("g0", "g1"): ("s1",),
                    ("g0", "g2"): ("s1",)})
        assert any("two s1 edges out of g0" in v
                   for v in check_hypotheses(3, g, 1))


class TestGridStrategy:
    def test_witness_extension_and_exhaustion(self):
        n = 3
        alg = AnAlgebra(n)
        strat = exists_strategy_grid(n)
        a = W.parse_word(n, "s0s0")
        move = Init(a, a + ("t",))
        gstate, net = strat.initial(move)
        state = play(alg, new_game(), move, net)
        assert state.pledge == ("g0", "g2", ("s0", "s0", "t"))

        w1 = Witness("g0", "g1", ("s1",), ("t",))
        gstate, net1 = strat.respond(gstate, w1)
        assert gstate.k == 1
        assert gstate.grid.f[("g0", "g3")] == ("s1",)
        assert gstate.grid.f[("g3", "g1")] == ("t",)
        assert check_grid(n, gstate.grid) == []
        assert check_hypotheses(n, gstate.grid, 1) == []
        state = play(alg, state, w1, net1)

        nxt = [m for m in enumerate_moves(alg, net1)
               if not is_trivial(alg, net1, m, state.pledge)]
        gstate, net2 = strat.respond(gstate, nxt[0])
        assert gstate.k == 2
        with pytest.raises(StrategyExhausted,
                           match="covers the first 2 rounds"):
            strat.respond(gstate, nxt[0])

    def test_trivial_moves_leave_the_network_alone(self):
        n = 3
        alg = AnAlgebra(n)
        strat = exists_strategy_grid(n)
        a = W.parse_word(n, "s0")
        gstate, net = strat.initial(Init(a, a + ("t",)))
        move = Witness("g0", "g1", W.EMPTY, ("s0",))
        gstate2, resp = strat.respond(gstate, move)
        assert resp == net
        assert gstate2.k == 1


class TestVerifyLemmas:
    def test_exhaustive_small_reports(self):
        r1 = verify_game_lemmas(1)
        assert r1.ok and r1.grid_mode == "exhaustive"
        assert (r1.grid_sequences, r1.grid_checks) == (13, 0)
        r3 = verify_game_lemmas(3)
        assert r3.ok and not r3.inconclusive
        assert (r3.grid_sequences, r3.grid_checks) == (31, 1405)
        assert r3.violations == ()
        assert "no violations" in r3.summary() or r3.summary()

    def test_sampling_is_deterministic(self):
        a = verify_game_lemmas(5, samples=40, seed=7)
        b = verify_game_lemmas(5, samples=40, seed=7)
        assert a == b
        assert a.grid_mode == "sampled"
        assert a.violations == ()

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError, match="at least 1"):
            verify_game_lemmas(0)


class TestBoundedSearch:
    def test_representable_monoid_saturates_and_embeds(self):
        verdict = bounded_nonrep_search(two_monoid(), depth=3)
        assert verdict.kind == "saturated"
        assert not verdict.inconclusive
        assert verdict.embedding.ok
        assert len(verdict.representation.base.names) == 3
        assert "verified" in verdict.summary()

    def test_one_element_algebra_is_a_point(self):
        one = OrderedAlgebra(("e",), ((0,),), ((True,),), identity=0)
        verdict = bounded_nonrep_search(one, depth=1)
        assert verdict.kind == "saturated"
        assert verdict.embedding.ok
        assert verdict.representation.base.names == ("x",)

    def test_truncated_words_refuted_at_depth_five(self):
        verdict = bounded_nonrep_search(truncated_an_algebra(3), depth=5)
        assert verdict.kind == "not-representable"
        assert verdict.init == ("s0t", "s3t")
        assert verdict.tree.depth() == 6  # opening + five rounds
        assert "wins in 5 rounds after the opening" in verdict.summary()
        assert "certificate is relative to minimal responses" in verdict.notes

    def test_depth_zero_is_inconclusive(self):
        verdict = bounded_nonrep_search(truncated_an_algebra(3), depth=0,
                                        saturate_steps=40, budget=20_000)
        assert verdict.kind == "unknown"
        assert verdict.inconclusive
        assert verdict.tree is None

    def test_verdicts_are_reproducible(self):
        a = bounded_nonrep_search(two_monoid(), depth=2)
        b = bounded_nonrep_search(two_monoid(), depth=2)
        assert (a.kind, a.nodes_explored) == (b.kind, b.nodes_explored)
        assert a.representation.map == b.representation.map
