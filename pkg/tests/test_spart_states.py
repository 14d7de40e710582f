"""State-space oracles: admissibility, movable boxes, degrees, rendering.

Golden movable-box lists and graded counts are frozen from worked
examples; the merge identities are cross-checked against the raw
elementary factors with exact arithmetic.
"""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from spart.exact_math import ONE, SpectralFunction, monomial, psi, qpow
from spart.parity_core import Parity
from spart.spart_states import (
    CONCAVE, CONVEX, BoxRef, FockFamily, FockState, GenPartition,
    add_moves, box_color, degree, enumerate_states, graded_counts,
    is_admissible, movable_boxes, parse_ascii, psi_sign, pure_state,
    q_content, remove_moves, render_ascii, _elementary_factors,
)

STD = Parity.standard(3, 2)


def mv_summary(state, i):
    return sorted((mv.kind, mv.order, mv.box.side, mv.box.index)
                  for mv in movable_boxes(state, i))


class TestGenPartition:
    def test_weakly_decreasing_enforced(self):
        with pytest.raises(ValueError):
            GenPartition.of((1, 2))

    def test_trim_and_get(self):
        p = GenPartition.of((3, 1, 0, 0)).trimmed()
        assert p.parts == (3, 1)
        assert p.get(1) == 3 and p.get(5) == 0
        assert p.size == 4

    def test_inf_prefix_only(self):
        GenPartition.of((float("inf"), 2, 1))
        with pytest.raises(ValueError):
            GenPartition.of((2, float("inf")))

    def test_json_round_trip(self):
        p = GenPartition.of((float("inf"), 4, 0))
        assert GenPartition.from_json(p.to_json()) == p


class TestAdmissibility:
    def test_s_tab_pair_is_admissible(self):
        st_ = pure_state(STD, 1, 0, (8, 5, 5, 4, 4, 1), (7, 5, 5, 1))
        assert is_admissible(st_)

    def test_repeat_blocked_at_plus_sign(self):
        assert not is_admissible(pure_state(STD, 1, 0, (2, 2)))
        assert is_admissible(pure_state(STD, 1, 0, (4, 4)))

    def test_vacuum_always_admissible(self):
        for kind, r in (("pure", 0), ("vec", 2), ("cov", 2)):
            for node in range(5):
                fam = FockFamily(kind, STD, node=node, r=r)
                assert is_admissible(FockState(fam))

    def test_length_clause_depends_on_node_sign(self):
        # s_0 = -1 lifts the length cap; s_1 = +1 enforces it
        assert is_admissible(pure_state(STD, 1, 0, (2, 1)))
        assert not is_admissible(pure_state(STD, 1, 1, (2, 1)))
        assert is_admissible(pure_state(STD, 1, 1, (2, 1), (1,)))

    def test_mu_never_longer_than_lambda(self):
        assert not is_admissible(pure_state(STD, 1, 0, (1,), (1, 1)))

    def test_vec_junction_chain(self):
        fam = FockFamily("vec", STD, node=0, r=1)
        ok = FockState(fam, GenPartition.of((1,)), nu=GenPartition.of((0,)))
        assert is_admissible(ok)
        bad = FockState(fam, GenPartition.of((2,)), nu=GenPartition.of((0,)))
        assert not is_admissible(bad)

    def test_cov_junction_chain(self):
        fam = FockFamily("cov", STD, node=0, r=1)
        ok = FockState(fam, GenPartition.of((1,)), GenPartition.of((1,)),
                       GenPartition.of((1,)))
        assert is_admissible(ok)
        bad = FockState(fam, GenPartition.of((1,)), GenPartition.of((2,)),
                        GenPartition.of((1,)))
        assert not is_admissible(bad)

    def test_wedge_repeat_rule(self):
        fam = FockFamily("vwedge", STD, sign=1, r=5)
        assert is_admissible(FockState(fam, GenPartition.of((4, 4, 4, 3, 2))))
        assert not is_admissible(FockState(fam, GenPartition.of((4, 4, 4, 2, 2))))


class TestQContent:
    def test_origin_box_trivial(self):
        assert q_content(1, 0, STD, 0, 0).is_one

    def test_row_branch_matches_bar(self):
        # last box of row j at value v: q1^{-bar(v-1)} q2^{j-1}
        c = q_content(1, 0, STD, 4 + 0, 0)  # row 1, value 5
        assert c == monomial(q=STD.bar(4), d=-STD.bar(4))

    def test_column_branch_matches_bar(self):
        # col 1 depth w: q3^{bar(-w)}
        w = 3
        c = q_content(1, 0, STD, 0, w)
        rb = STD.bar(-w)
        assert c == monomial(q=-rb, d=-rb)

    def test_q2_shift_with_direction(self):
        plus = q_content(1, 0, STD, 2, 1)
        minus = q_content(-1, 0, STD, 2, 1)
        assert plus == monomial(q=STD.bar(1), d=-STD.bar(1)) * qpow(2)
        assert minus == monomial(q=STD.bar(1), d=-STD.bar(1)) * qpow(-2)


class TestMovableBoxes:
    def test_vector_wedge_figure(self):
        fam = FockFamily("vwedge", STD, sign=1, r=5)
        st_ = FockState(fam, GenPartition.of((4, 4, 4, 3, 2)))
        expected = {
            0: [(CONCAVE, 3, "row", 1)],
            1: [],
            2: [(CONVEX, 1, "row", 5)],
            3: [(CONCAVE, 2, "row", 5)],
            4: [(CONCAVE, 1, "row", 4), (CONVEX, 3, "row", 3)],
        }
        for i in range(5):
            assert mv_summary(st_, i) == sorted(expected[i]), f"node {i}"

    def test_covector_wedge_figure(self):
        fam = FockFamily("cwedge", STD, sign=1, r=4)
        st_ = FockState(fam, mu=GenPartition.of((3, 1, 1, 0)))
        expected = {
            0: [(CONVEX, 1, "column", 4)],
            1: [(CONCAVE, 1, "column", 1)],
            2: [(CONVEX, 1, "column", 1)],
            3: [(CONCAVE, 2, "column", 2)],
            4: [(CONCAVE, 1, "column", 4), (CONVEX, 2, "column", 3)],
        }
        for i in range(5):
            assert mv_summary(st_, i) == sorted(expected[i]), f"node {i}"

    def test_vacuum_highest_weight_entry(self):
        vac = pure_state(STD, 1, 0)
        mvs = movable_boxes(vac, 0)
        assert len(mvs) == 1
        mv = mvs[0]
        assert mv.kind == CONVEX and mv.order == 1 and mv.content.is_one
        assert (mv.box.x, mv.box.y) == (0, 0)
        for i in range(1, 5):
            assert movable_boxes(vac, i) == []

    def test_blocked_moves_annihilate(self):
        st_ = pure_state(STD, 1, 0, (1,), (1,))
        assert movable_boxes(st_, 0) == []

    def test_violet_order_grows_with_length_gap(self):
        st_ = pure_state(STD, 1, 0, (3, 2))
        diag = [mv for mv in movable_boxes(st_, 0)
                if mv.box.x == mv.box.y == 2]
        assert len(diag) == 1 and diag[0].order == 3  # len(lam)-len(mu)+1

    def test_contents_distinct_per_node(self):
        fam = FockFamily("pure", STD, node=0, sign=1)
        for st_ in enumerate_states(fam, 7):
            for i in range(5):
                cs = [mv.content for mv in movable_boxes(st_, i)]
                assert len(set(cs)) == len(cs)

    def test_merge_preserves_product(self):
        # packaged psi product equals the raw elementary product, exactly
        fams = [FockFamily("pure", STD, node=1, sign=1),
                FockFamily("pure", STD, node=0, sign=-1),
                FockFamily("vec", STD, node=2, r=2),
                FockFamily("cov", STD, node=3, r=1)]
        for fam in fams:
            for st_ in itertools.islice(enumerate_states(fam, 5), 40):
                for i in range(5):
                    raw = SpectralFunction.one()
                    for f in _elementary_factors(st_).get(i, []):
                        raw = raw * psi(f.index, monomial(q=-f.a, d=f.a) * qpow(2 * f.e))
                    packed = SpectralFunction.one()
                    for mv in movable_boxes(st_, i):
                        sgn = psi_sign(STD, i, mv.box.side, mv.kind)
                        packed = packed * psi(sgn * mv.order, mv.content)
                    assert raw == packed, (st_, i)


class TestMoves:
    def test_add_remove_duality(self):
        fam = FockFamily("pure", STD, node=0, sign=1)
        for st_ in enumerate_states(fam, 6):
            for i in range(5):
                for tgt, box in add_moves(st_, i):
                    assert is_admissible(tgt)
                    assert any(b == box for _, b in remove_moves(tgt, i))
                    diff = [a - b for a, b in zip(degree(tgt), degree(st_))]
                    assert diff == [1 if c == i else 0 for c in range(5)]

    def test_concave_entries_have_matching_add(self):
        # every concave movable with a real anchor box admits the add
        fam = FockFamily("pure", STD, node=0, sign=1)
        for st_ in enumerate_states(fam, 6):
            for i in range(5):
                adds = {b.color: True for _, b in add_moves(st_, i)}
                for mv in movable_boxes(st_, i):
                    if mv.kind == CONCAVE:
                        assert adds.get(i, False), (st_, i, mv)

    def test_enumeration_closed_under_removal(self):
        fam = FockFamily("pure", STD, node=4, sign=1)
        seen = set(enumerate_states(fam, 6))
        for st_ in seen:
            for i in range(5):
                for tgt, _ in remove_moves(st_, i):
                    assert tgt in seen


class TestDegree:
    def test_39_box_example(self):
        st_ = pure_state(STD, 1, 0, (8, 5, 5, 4, 4, 2), (7, 2, 1, 1))
        d = degree(st_)
        assert sum(d) == 39
        assert d == (8, 8, 7, 8, 8)

    def test_single_box(self):
        st_ = pure_state(STD, 1, 0, (1,))
        assert degree(st_) == (1, 0, 0, 0, 0)

    def test_vector_window_anchor(self):
        fam = FockFamily("vwedge", STD, sign=1, r=1)
        assert degree(FockState(fam, GenPartition.of((-1,)))) == (0,) * 5
        assert degree(FockState(fam, GenPartition.of((2,)))) == (1, 1, 1, 0, 0)
        assert degree(FockState(fam, GenPartition.of((-3,)))) == (0, 0, 0, -1, -1)

    def test_covector_window_anchor(self):
        fam = FockFamily("cwedge", STD, sign=1, r=1)
        assert degree(FockState(fam, mu=GenPartition.of((0,)))) == (0,) * 5
        assert degree(FockState(fam, mu=GenPartition.of((-2,)))) == (0, 0, 0, 1, 1)
        assert degree(FockState(fam, mu=GenPartition.of((1,)))) == (-1, 0, 0, 0, 0)


class TestEnumeration:
    def test_pure_graded_counts(self):
        f0 = FockFamily("pure", STD, node=0, sign=1)
        assert graded_counts(f0, 10) == [1, 1, 2, 4, 6, 10, 15, 22, 33, 48, 70]
        f1 = FockFamily("pure", STD, node=1, sign=1)
        assert graded_counts(f1, 10) == [1, 1, 2, 3, 5, 8, 12, 19, 28, 41, 60]
        f4 = FockFamily("pure", STD, node=4, sign=1)
        assert graded_counts(f4, 10) == [1, 1, 3, 6, 10, 17, 27, 42, 63, 94, 139]

    def test_node_symmetry_of_counts(self):
        # conjugation symmetry of the principal series
        f0 = FockFamily("pure", STD, node=0, sign=1)
        f3 = FockFamily("pure", STD, node=3, sign=1)
        assert graded_counts(f0, 8) == graded_counts(f3, 8)
        f1 = FockFamily("pure", STD, node=1, sign=1)
        f2 = FockFamily("pure", STD, node=2, sign=1)
        assert graded_counts(f1, 8) == graded_counts(f2, 8)

    def test_one_box_states(self):
        fam = FockFamily("pure", STD, node=0, sign=1)
        states = [s for s in enumerate_states(fam, 1)]
        assert len(states) == 2
        assert states[0] == FockState(fam)
        assert states[1] == pure_state(STD, 1, 0, (1,))

    def test_no_duplicates(self):
        for kind, r in (("pure", 0), ("vec", 1), ("cov", 2)):
            fam = FockFamily(kind, STD, node=2, r=r)
            seen = list(enumerate_states(fam, 6))
            assert len(seen) == len(set(seen))

    def test_wedge_enumeration_rejected(self):
        fam = FockFamily("vwedge", STD, sign=1, r=2)
        with pytest.raises(ValueError):
            list(enumerate_states(fam, 3))


class TestRendering:
    def test_s_tab_first_row(self):
        st_ = pure_state(STD, 1, 0, (8, 5, 5, 4, 4, 1), (7, 5, 5, 1))
        lines = render_ascii(st_).splitlines()
        assert lines[1].split("|")[1].strip() == "0 1 2 3 4 0 1 2"

    def test_round_trip_pure(self):
        st_ = pure_state(STD, 1, 0, (8, 5, 5, 4, 4, 1), (7, 5, 5, 1))
        assert parse_ascii(render_ascii(st_)) == st_

    def test_round_trip_vacuum(self):
        st_ = pure_state(STD, 1, 3)
        assert parse_ascii(render_ascii(st_)) == st_

    def test_round_trip_wedges(self):
        fam = FockFamily("vwedge", STD, sign=1, r=5)
        st_ = FockState(fam, GenPartition.of((2, 0, -1, -1, -3)))
        assert parse_ascii(render_ascii(st_)) == st_
        fam = FockFamily("cwedge", STD, sign=1, r=4)
        st_ = FockState(fam, mu=GenPartition.of((3, 1, 1, 0)))
        assert parse_ascii(render_ascii(st_)) == st_

    def test_round_trip_non_pure(self):
        fam = FockFamily("vec", STD, node=1, r=2)
        st_ = FockState(fam, GenPartition.of((2, 1)), GenPartition.of((1,)),
                        GenPartition.of((3, 1)))
        assert is_admissible(st_)
        assert parse_ascii(render_ascii(st_)) == st_

    def test_corrupt_diagram_rejected(self):
        st_ = pure_state(STD, 1, 0, (3,))
        txt = render_ascii(st_).replace("1", "2")
        with pytest.raises(ValueError):
            parse_ascii(txt)

    @given(st.integers(0, 10 ** 9))
    @settings(max_examples=60, deadline=None)
    def test_random_walk_round_trip(self, seed):
        import random
        rng = random.Random(seed)
        fam = FockFamily("pure", STD, node=rng.randrange(5),
                         sign=rng.choice((1, -1)))
        state = FockState(fam)
        for _ in range(rng.randrange(9)):
            opts = add_moves(state)
            if not opts:
                break
            state = rng.choice(opts)[0]
        assert parse_ascii(render_ascii(state)) == state
        assert GenPartition.from_json(state.lam.to_json()) == state.lam
        assert FockState.from_json(state.to_json()) == state


class TestJson:
    def test_state_json_round_trip(self):
        fam = FockFamily("cov", STD, node=3, r=2)
        st_ = FockState(fam, GenPartition.of((2,)), GenPartition.of((1,)),
                        GenPartition.of((2, 1)))
        blob = st_.to_json()
        assert blob["family"]["kind"] == "cov"
        assert FockState.from_json(blob) == st_

    def test_color_rule(self):
        assert box_color(STD, 0, 5, 0) == 0
        assert box_color(STD, 2, 0, 1) == 1
