"""Relation operations against brute-force definitional oracles.

Each operation is checked three ways: frozen expected values on small hand
inputs, exhaustive agreement with a literal quantifier evaluation over all
relations at |X|=2, and the algebraic laws the operations are supposed to
satisfy (searched exhaustively at |X|=2, order properties up to |X|=3).
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relic import literals
from relic.relations import (
    UNDEFINED,
    Relation,
    SpaceMismatchError,
    StateSpace,
    all_relations,
    diagonal,
    empty,
    fail_all,
    from_mask,
    full,
    left_total_relations,
    make_space,
    mask_of,
    program_relations,
    total_relations,
)

X1 = make_space(["1"])
X2 = make_space(["1", "2"])
X3 = make_space(["1", "2", "3"])
X2F = make_space(["1", "2"], fail_name="0")


def rel(space, text):
    return literals.parse_relation(space, text)


# -- oracles: direct transcriptions of the defining formulas ---------------

def compose_oracle(s, t):
    n = s.space.size
    pairs = {(x, y) for x in range(n) for y in range(n)
             if any((x, z) in s.pairs and (z, y) in t.pairs for z in range(n))}
    return Relation(s.space, pairs)


def demonic_oracle(s, t):
    n = s.space.size
    pairs = set()
    for x in range(n):
        for y in range(n):
            if not any((x, z) in s.pairs and (z, y) in t.pairs for z in range(n)):
                continue
            if all(any((w, v) in t.pairs for v in range(n))
                   for w in range(n) if (x, w) in s.pairs):
                pairs.add((x, y))
    return Relation(s.space, pairs)


def refines_oracle(s, t):
    dom_t = {x for x, _ in t.pairs}
    dom_s = {x for x, _ in s.pairs}
    return dom_t <= dom_s and all(p in t.pairs for p in s.pairs if p[0] in dom_t)


def join_oracle(s, t):
    dom_both = {x for x, _ in s.pairs} & {x for x, _ in t.pairs}
    return Relation(s.space, {p for p in s.pairs | t.pairs if p[0] in dom_both})


def constellation_oracle(s, t):
    ran_s = {y for _, y in s.pairs}
    dom_t = {x for x, _ in t.pairs}
    if not ran_s <= dom_t:
        return UNDEFINED
    return compose_oracle(s, t)


ALL2 = list(all_relations(X2))


class TestFrozenExamples:
    def test_compose(self):
        s = rel(X2, "{(1,1),(1,2)}")
        t = rel(X2, "{(1,1)}")
        assert s.compose(t) == rel(X2, "{(1,1)}")
        assert s.compose(t) == compose_oracle(s, t)

    def test_demonic_compose_kills_unsafe_start(self):
        s = rel(X2, "{(1,1),(1,2)}")
        t = rel(X2, "{(1,1)}")
        # branch 1->2 cannot be continued through t, so state 1 dies
        assert s.compose_demonic(t) == empty(X2)
        assert demonic_oracle(s, t) == empty(X2)

    def test_demonic_compose_safe(self):
        s = rel(X2, "{(1,1),(2,1)}")
        t = rel(X2, "{(1,2)}")
        expect = rel(X2, "{(1,2),(2,2)}")
        assert s.compose_demonic(t) == expect
        assert demonic_oracle(s, t) == expect

    def test_refines(self):
        s = rel(X2, "{(1,1),(1,2)}")
        t = rel(X2, "{(1,1)}")
        assert not s.refines_demonic(t)
        assert t.refines_demonic(s)
        assert refines_oracle(s, t) is False
        assert refines_oracle(t, s) is True

    def test_everything_refined_by_empty(self):
        for s in ALL2:
            assert s.refines_demonic(empty(X2))

    def test_join(self):
        s = rel(X2, "{(1,1),(2,1)}")
        t = rel(X2, "{(2,2)}")
        expect = rel(X2, "{(2,1),(2,2)}")
        assert s.join_demonic(t) == expect
        assert join_oracle(s, t) == expect

    def test_constellation(self):
        s = rel(X2, "{(1,2),(2,2)}")
        t = rel(X2, "{(2,1)}")
        assert s.constellation(t) == rel(X2, "{(1,1),(2,1)}")
        u = rel(X2, "{(1,1)}")
        assert s.constellation(u) is UNDEFINED
        assert constellation_oracle(s, u) is UNDEFINED


class TestOracleAgreement:
    """Exhaustive agreement with the definitional forms at |X|=2."""

    def test_compose(self):
        for s, t in itertools.product(ALL2, repeat=2):
            assert s.compose(t) == compose_oracle(s, t)

    def test_demonic(self):
        for s, t in itertools.product(ALL2, repeat=2):
            assert s.compose_demonic(t) == demonic_oracle(s, t)

    def test_refines(self):
        for s, t in itertools.product(ALL2, repeat=2):
            assert s.refines_demonic(t) == refines_oracle(s, t)

    def test_join(self):
        for s, t in itertools.product(ALL2, repeat=2):
            assert s.join_demonic(t) == join_oracle(s, t)

    def test_constellation(self):
        for s, t in itertools.product(ALL2, repeat=2):
            got, want = s.constellation(t), constellation_oracle(s, t)
            if want is UNDEFINED:
                assert got is UNDEFINED
            else:
                assert got == want


class TestLaws:
    def test_angelic_composition_associative(self):
        for s, t, u in itertools.product(ALL2, repeat=3):
            assert s.compose(t).compose(u) == s.compose(t.compose(u))

    def test_demonic_composition_associative(self):
        for s, t, u in itertools.product(ALL2, repeat=3):
            assert (s.compose_demonic(t).compose_demonic(u)
                    == s.compose_demonic(t.compose_demonic(u)))

    def test_demonic_right_monotone_over_subset(self):
        for s0, s1, t in itertools.product(ALL2, repeat=3):
            if s0.pairs <= s1.pairs:
                assert t.compose_demonic(s0).pairs <= t.compose_demonic(s1).pairs

    def test_demonic_not_left_monotone_over_subset(self):
        # the failure must be found by search, not assumed
        found = None
        for s0, s1, t in itertools.product(ALL2, repeat=3):
            if s0.pairs <= s1.pairs:
                if not s0.compose_demonic(t).pairs <= s1.compose_demonic(t).pairs:
                    found = (s0, s1, t)
                    break
        assert found is not None, "demonic composition looked left monotone at |X|=2"

    def test_diagonal_is_identity(self):
        d = diagonal(X2)
        for s in ALL2:
            assert s.compose(d) == s
            assert d.compose(s) == s
            assert s.compose_demonic(d) == s

    def test_join_is_demonic_glb_shape(self):
        # s |_| t refines both arguments, and is the least such upper bound
        for s, t in itertools.product(ALL2, repeat=2):
            j = s.join_demonic(t)
            assert s.refines_demonic(j)
            assert t.refines_demonic(j)
            for u in ALL2:
                if s.refines_demonic(u) and t.refines_demonic(u):
                    assert j.refines_demonic(u)

    def test_refinement_partial_order_small(self):
        rels3 = list(all_relations(X3))
        index = {r: i for i, r in enumerate(rels3)}
        m = np.zeros((len(rels3), len(rels3)), dtype=bool)
        for s in rels3:
            for t in rels3:
                m[index[s], index[t]] = s.refines_demonic(t)
        assert m.diagonal().all()
        assert not (m & m.T & ~np.eye(len(rels3), dtype=bool)).any()
        reach2 = (m.astype(np.uint8) @ m.astype(np.uint8)) > 0
        assert not (reach2 & ~m).any(), "refinement not transitive at |X|=3"

    def test_demonic_equals_angelic_on_left_total(self):
        for s in left_total_relations(X2):
            for t in left_total_relations(X2):
                assert s.compose_demonic(t) == s.compose(t)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_associativity_random_3(data):
    masks = data.draw(st.tuples(*[st.integers(0, 511)] * 3))
    s, t, u = (from_mask(X3, m) for m in masks)
    assert s.compose(t).compose(u) == s.compose(t.compose(u))
    assert (s.compose_demonic(t).compose_demonic(u)
            == s.compose_demonic(t.compose_demonic(u)))


class TestClassify:
    def test_counts(self):
        assert len(ALL2) == 16
        assert len(list(left_total_relations(X2))) == 9
        assert len(list(total_relations(X2))) == 7
        x0 = X2F
        assert len(list(program_relations(x0))) == 49

    def test_program_relation_shape(self):
        for p in program_relations(X2F):
            assert p.is_program_relation()
            assert p.is_left_total
        bad = rel(X2F, "{(1,1),(2,2),(0,0),(0,1)}")
        assert not bad.is_program_relation()
        assert fail_all(X2F).is_program_relation()

    def test_classify_dict(self):
        d = diagonal(X2).classify()
        assert d == {"is_left_total": True, "is_total": True}
        assert fail_all(X2F).classify()["is_total"] is False

    def test_enumeration_canonical_order(self):
        masks = [mask_of(r) for r in all_relations(X2)]
        assert masks == sorted(masks)


class TestSpaces:
    def test_mismatch_raises(self):
        with pytest.raises(SpaceMismatchError):
            diagonal(X2).compose(diagonal(X3))

    def test_fail_roundtrip(self):
        assert X2.extend_by_fail() == X2F
        assert X2F.drop_fail() == X2

    def test_fail_collision(self):
        with pytest.raises(ValueError):
            make_space(["0", "1"], fail_name="0")

    def test_constants(self):
        assert full(X1) == diagonal(X1)
        assert str(fail_all(X2F)) == "{(1,0),(2,0),(0,0)}"
        assert len(full(X3)) == 9

    def test_literal_roundtrip(self):
        for s in ALL2:
            assert rel(X2, str(s)) == s

    def test_space_decl(self):
        sp = literals.parse_space("space X = {1,2,3} fail 0")
        assert sp.names == ("1", "2", "3", "0")
        assert sp.fail_index == 3

    def test_env_parse(self):
        text = """
        # demo
        space X = {1,2} fail 0
        a = {(1,1),(2,0),(0,0)}
        b = {}
        """
        space, env = literals.parse_env(text)
        assert space == X2F
        assert env["a"] == rel(X2F, "{(1,1),(2,0),(0,0)}")
        assert env["b"] == empty(X2F)

    def test_env_errors(self):
        with pytest.raises(literals.FormatError):
            literals.parse_env("a = {(1,1)}")
        with pytest.raises(literals.FormatError):
            literals.parse_env("space X = {1}\nspace Y = {2}")
        with pytest.raises(literals.FormatError):
            literals.parse_env("space X = {1}\na = {(1,2)}")
