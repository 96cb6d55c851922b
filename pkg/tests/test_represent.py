"""Representation constructors and the embedding verifier."""

from pathlib import Path

import pytest

from relic.algebras import (
    OrderedAlgebra,
    adjoin_constellation_zero,
    enumerate_small,
    parse_algebra,
)
from relic.literals import parse_env
from relic.programs import lift_demonic_total
from relic.relations import UNDEFINED, empty, fail_all, full
from relic.represent import (
    Representation,
    format_representation,
    represent_dual_zero,
    represent_preconstellation,
    represent_weak_zero,
    represent_zero_angelic,
    verify_embedding,
    zareckii,
)

DATA = Path(__file__).parent / "data"


def idempotent_monoid():
    # {1', a} with a.a = a and the equality order
    return OrderedAlgebra(
        ("1'", "a"), [[0, 1], [1, 1]], [[True, False], [False, True]],
        identity=0,
    )


def weak_chain():
    return OrderedAlgebra(
        ("0", "a"), [[0, 0], [0, 1]], [[True, True], [False, True]], zero=0
    )


def dual_chain():
    return OrderedAlgebra(
        ("0", "a"), [[0, 0], [0, 1]], [[True, False], [True, True]], zero=0
    )


def name_pairs(rep, element):
    rel = rep.image(element)
    ns = rel.space.names
    return {(ns[x], ns[y]) for x, y in rel.pairs}


class TestZareckii:
    def test_two_element_monoid(self):
        rep = zareckii(idempotent_monoid())
        assert rep.base.names == ("1'", "a")
        assert name_pairs(rep, "a") == {("1'", "a"), ("a", "a")}
        assert name_pairs(rep, "1'") == {("1'", "1'"), ("a", "a")}
        ra = rep.image("a")
        assert ra.compose(ra) == ra
        assert verify_embedding(rep).ok

    def test_identity_image_is_not_the_diagonal(self):
        # a acts as identity on the chain 0 < a, and its image picks up
        # the extra pair (a,0) because 0 <= a.a
        chain_monoid = OrderedAlgebra(
            ("0", "a"), [[0, 0], [0, 1]], [[True, True], [False, True]],
            identity=1,
        )
        rep = zareckii(chain_monoid)
        assert rep.base.names == ("0", "a")
        assert name_pairs(rep, "a") == {("0", "0"), ("a", "0"), ("a", "a")}
        assert verify_embedding(rep).ok

    def test_one_element_monoid(self):
        one = OrderedAlgebra(("u",), [[0]], [[True]], identity=0)
        rep = zareckii(one)
        assert rep.base.size == 1
        assert name_pairs(rep, "u") == {("u", "u")}
        assert verify_embedding(rep).ok

    def test_semigroup_gets_isolated_identity(self):
        left_zero = OrderedAlgebra(
            ("a", "b"), [[0, 0], [1, 1]], [[True, False], [False, True]]
        )
        rep = zareckii(left_zero)
        assert rep.base.names == ("a", "b", "1'")
        assert len(rep.map) == 2  # only the original elements are represented
        assert all(rel.is_left_total for rel in rep.map)
        assert verify_embedding(rep).ok

    def test_rejects_non_members(self):
        z2 = OrderedAlgebra(
            ("a", "b"), [[0, 1], [1, 0]], [[True, True], [False, True]]
        )
        with pytest.raises(ValueError, match="outside class ordered_semigroup"):
            zareckii(z2)

    def test_all_small_semigroups_faithful(self):
        for alg in enumerate_small("ordered_semigroup", 3):
            rep = zareckii(alg)
            assert all(rel.is_left_total for rel in rep.map)
            assert verify_embedding(rep).ok, alg.product


class TestWeakZero:
    def test_two_chain(self):
        rep = represent_weak_zero(weak_chain())
        assert rep.base.names == ("a", "1'", "0")
        assert rep.base.fail_name == "0"
        assert rep.image("0") == fail_all(rep.base)
        assert name_pairs(rep, "a") == {
            ("a", "a"), ("a", "0"), ("1'", "a"), ("1'", "0"), ("0", "0")
        }
        assert rep.signature == {";", "<=", "0-as-fail"}
        assert verify_embedding(rep).ok

    def test_monoid_base_reused(self):
        # a is already an identity here, so no fresh 1' is adjoined
        alg = OrderedAlgebra(
            ("0", "a"), [[0, 0], [0, 1]], [[True, True], [False, True]],
            zero=0, identity=1,
        )
        rep = represent_weak_zero(alg)
        assert rep.base.names == ("a", "0")

    def test_one_element_gets_fresh_identity(self):
        lone = OrderedAlgebra(("0",), [[0]], [[True]], zero=0, identity=0)
        rep = represent_weak_zero(lone)
        assert rep.base.names == ("1'", "0")
        assert rep.image("0") == fail_all(rep.base)

    def test_all_small_members_faithful(self):
        for alg in enumerate_small("weak_zero", 3):
            rep = represent_weak_zero(alg)
            f = rep.base.fail_index
            for rel in rep.map:
                # the zero row collapses to the fail loop in every image
                assert rel.image(f) == frozenset({f})
                assert rel.is_program_relation()
            assert rep.image(alg.zero) == fail_all(rep.base)
            assert verify_embedding(rep).ok


class TestZeroAngelic:
    def test_two_chain(self):
        rep = represent_zero_angelic(weak_chain())
        assert rep.base.names == ("a", "1'")
        assert rep.image("0") == empty(rep.base)
        assert verify_embedding(rep).ok

    def test_composition_survives_the_cut(self):
        # check preservation directly against the table, not via the verifier
        for alg in enumerate_small("zero", 3):
            rep = represent_zero_angelic(alg)
            for i in range(alg.size):
                for j in range(alg.size):
                    got = rep.map[i].compose(rep.map[j])
                    assert got == rep.map[alg.product[i][j]]

    def test_all_small_members_faithful(self):
        # order reflection after the cut is part of the verifier's sweep
        for alg in enumerate_small("zero", 3):
            assert verify_embedding(represent_zero_angelic(alg)).ok


class TestDualZero:
    def test_chain_total_mode(self):
        rep = represent_dual_zero(dual_chain(), "total_angelic")
        assert rep.base.size == 3
        assert rep.image("0") == full(rep.base)
        assert all(rel.is_total for rel in rep.map)
        assert verify_embedding(rep).ok

    def test_chain_demonic_mode(self):
        rep = represent_dual_zero(dual_chain(), "demonic")
        assert rep.image("0") == empty(rep.base)
        assert rep.signature == {"*", "[=", "0-as-empty"}
        # the empty relation is the largest under refinement
        assert all(rel.refines_demonic(rep.image("0")) for rel in rep.map)
        assert verify_embedding(rep).ok

    def test_modes_agree_through_the_lift(self):
        for alg in enumerate_small("dual_zero", 3):
            total = represent_dual_zero(alg, "total_angelic")
            demonic = represent_dual_zero(alg, "demonic")
            for t, d in zip(total.map, demonic.map):
                assert lift_demonic_total(d).pairs == t.pairs

    def test_mode_validated(self):
        with pytest.raises(ValueError, match="unknown mode"):
            represent_dual_zero(dual_chain(), "angelic")

    def test_all_small_members_faithful(self):
        for alg in enumerate_small("dual_zero", 3):
            assert verify_embedding(represent_dual_zero(alg, "total_angelic")).ok
            assert verify_embedding(represent_dual_zero(alg, "demonic")).ok


class TestPreconstellation:
    def test_definedness_agreement_on_partial_table(self):
        alg = parse_algebra((DATA / "partial_three.alg").read_text())
        # sanity: the table is genuinely one-sided
        a, b = alg.index("a"), alg.index("b")
        assert alg.prod(a, b) is not UNDEFINED
        assert alg.prod(b, a) is UNDEFINED
        rep = represent_preconstellation(alg)
        for i in range(alg.size):
            for j in range(alg.size):
                got = rep.map[i].constellation(rep.map[j])
                want = alg.product[i][j]
                if want is UNDEFINED:
                    assert got is UNDEFINED, (i, j)
                else:
                    assert got == rep.map[want], (i, j)
        assert verify_embedding(rep).ok

    def test_base_is_carrier_plus_fresh_point(self):
        alg = parse_algebra((DATA / "ordered_cap.alg").read_text())
        rep = represent_preconstellation(alg)
        assert rep.base.names == alg.names + ("e",)
        assert verify_embedding(rep).ok

    def test_equality_order_images_are_functional(self):
        seen = 0
        for alg in enumerate_small("ordered_preconstellation", 3):
            if alg.is_partial:
                continue
            if any(alg.leq[i][j] != (i == j)
                   for i in range(alg.size) for j in range(alg.size)):
                continue
            rep = represent_preconstellation(alg)
            e = alg.size
            for p, rel in enumerate(rep.map):
                xs = [x for x, _ in rel.pairs]
                assert len(xs) == len(set(xs))
                want = {(x, alg.product[x][p]) for x in range(alg.size)}
                want.add((e, p))
                assert rel.pairs == frozenset(want)
            seen += 1
        assert seen == 30

    def test_total_tables_degenerate_to_zareckii(self):
        seen = 0
        for alg in enumerate_small("ordered_preconstellation", 3):
            if alg.is_partial or alg.identity is not None:
                continue
            rp = represent_preconstellation(alg)
            rz = zareckii(alg)
            assert [r.pairs for r in rp.map] == [r.pairs for r in rz.map]
            seen += 1
        assert seen == 185

    def test_zero_variant(self):
        alg = parse_algebra((DATA / "left_zero_pair.alg").read_text())
        ext = adjoin_constellation_zero(alg)
        rep = represent_preconstellation(ext)
        assert rep.image(ext.zero) == empty(rep.base)
        assert "0-as-empty" in rep.signature
        assert verify_embedding(rep).ok

    def test_zero_alone(self):
        lone = OrderedAlgebra(("0",), [[0]], [[True]], zero=0)
        rep = represent_preconstellation(lone)
        assert rep.base.names == ("e",)
        assert rep.map[0] == empty(rep.base)
        assert verify_embedding(rep).ok

    def test_fresh_point_name_collision(self):
        alg = OrderedAlgebra(("e",), [[0]], [[True]])
        with pytest.raises(ValueError, match="collides"):
            represent_preconstellation(alg)

    def test_all_small_members_faithful(self):
        for alg in enumerate_small("ordered_preconstellation", 3):
            assert verify_embedding(represent_preconstellation(alg)).ok
        for alg in enumerate_small("preconstellation_zero", 3):
            assert verify_embedding(represent_preconstellation(alg)).ok


class TestVerifyEmbedding:
    def test_swapped_images_detected(self):
        rep = zareckii(idempotent_monoid())
        broken = Representation(
            rep.source, rep.base, (rep.map[1], rep.map[0]), rep.signature)
        report = verify_embedding(broken)
        assert not report.ok
        assert any(v.law.startswith("preserve-") for v in report.violations)

    def test_order_reflection_flagged(self):
        # an antichain mapped onto nested relations reflects too much order
        flat = OrderedAlgebra(
            ("a", "b"), [[0, 0], [0, 0]], [[True, False], [False, True]]
        )
        rep = zareckii(flat)
        bigger = rep.map[0].union(rep.map[1])
        fudged = Representation(
            rep.source, rep.base, (rep.map[0], bigger), frozenset({"<="}))
        report = verify_embedding(fudged)
        assert any(v.law == "order-reflect-<=" for v in report.violations)

    def test_duplicate_images_flagged(self):
        rep = zareckii(idempotent_monoid())
        doubled = Representation(
            rep.source, rep.base, (rep.map[0], rep.map[0]), frozenset())
        report = verify_embedding(doubled)
        assert [v.law for v in report.violations] == ["injective"]
        assert report.violations[0].witness == ("1'", "a")

    def test_constant_checks(self):
        rep = zareckii(idempotent_monoid())
        nozero = Representation(
            rep.source, rep.base, rep.map, frozenset({"0-as-empty"}))
        report = verify_embedding(nozero)
        assert [v.law for v in report.violations] == ["constant-0-as-empty"]
        assert "no designated zero" in report.violations[0].detail

        za = represent_zero_angelic(weak_chain())
        wrong = Representation(
            za.source, za.base, za.map, frozenset({"0-as-fail"}))
        report = verify_embedding(wrong)
        assert any("base has no fail state" in v.detail for v in report.violations)

    def test_identity_symbol(self):
        rep = zareckii(idempotent_monoid())
        with_id = Representation(
            rep.source, rep.base, rep.map, rep.signature | {"1'"})
        assert verify_embedding(with_id).ok
        swapped = Representation(
            rep.source, rep.base, (rep.map[1], rep.map[0]),
            frozenset({";", "1'"}))
        report = verify_embedding(swapped)
        assert any(v.law == "constant-1'" for v in report.violations)

    def test_join_symbol_on_a_chain(self):
        rep = zareckii(weak_chain())
        with_join = Representation(
            rep.source, rep.base, rep.map, rep.signature | {"|"})
        assert verify_embedding(with_join).ok

    def test_report_is_sorted(self):
        rep = zareckii(idempotent_monoid())
        broken = Representation(
            rep.source, rep.base, (rep.map[1], rep.map[0]), rep.signature)
        vs = verify_embedding(broken).violations
        assert list(vs) == sorted(vs, key=lambda v: (v.law, v.witness, v.detail))

    def test_malformed_representations_rejected(self):
        rep = zareckii(idempotent_monoid())
        with pytest.raises(ValueError, match="map covers"):
            Representation(rep.source, rep.base, rep.map[:1], rep.signature)
        with pytest.raises(ValueError, match="unknown signature symbols"):
            Representation(rep.source, rep.base, rep.map, frozenset({"bogus"}))
        other = represent_zero_angelic(weak_chain())
        with pytest.raises(ValueError, match="off the base"):
            Representation(rep.source, rep.base, other.map, rep.signature)


class TestFormatting:
    def test_weak_zero_layout(self):
        text = format_representation(represent_weak_zero(weak_chain()))
        assert text == (
            "space base = {a, 1'} fail 0\n"
            "0 = {(a,0),(1',0),(0,0)}\n"
            "a = {(a,a),(a,0),(1',a),(1',0),(0,0)}\n"
        )

    def test_round_trips_through_env_parser(self):
        rep = zareckii(idempotent_monoid())
        space, bindings = parse_env(format_representation(rep))
        assert space == rep.base
        assert bindings == {"1'": rep.map[0], "a": rep.map[1]}
