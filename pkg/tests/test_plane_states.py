"""Layered states: chain order, boundaries, eigenvalue engines, ladders.

The vertical gravity-plus-facet cell rule is the independent oracle for
the chain relation between neighbouring layers: both are evaluated on
exhaustive stacks of admissible pairs and must agree.  Graded counts,
corner eigenvalues of the boundary vacuum and single-box matrix
coefficients are frozen from worked examples; the two eigenvalue engines
cross-check each other on everything enumerable at desk scale.
"""

import itertools
from fractions import Fraction

import pytest

from spart.exact_math import (
    KMON, ONE, Q, Q1, Q2, Q3, ScalarExpr, SpectralFunction, f_factor,
    linear, monomial, psi, qpow,
)
from spart.parity_core import Parity
from spart.plane_states import (
    PlaneState, add_plane_moves, boundary_error, boundary_vacuum,
    contains_box, enumerate_plane, from_tableaux, generalized_pair,
    graded_plane_counts, is_colorless_self_comparable, is_valid_plane,
    layer_dominates, layer_pair, macmahon_k_eigenvalue, pair_color_counts,
    plane_degree, plane_degree_vector, plane_eigenvalue_table, plane_error,
    plane_from_json, plane_ladder_coeffs, plane_to_json, remove_plane_moves,
    render_plane, shift_exponent, SuperTableau, tableau_degree_vector,
    tableau_error, tableau_pair_error, to_tableaux, vacuum_pair,
    vertical_rule_check,
)
from spart.spart_states import (
    INF, FockFamily, GenPartition, enumerate_states,
)

STD = Parity.standard(3, 2)
ALT = Parity.from_string("+-++-")


def gp(*parts):
    return GenPartition.of(parts)


def pair(lam, mu):
    return (GenPartition.of(tuple(lam)), GenPartition.of(tuple(mu)))


FIG_LAYERS = (
    ((5, 5, 4, 4), (5, 5, 5, 1)),
    ((4, 4, 3, 2), (4, 3, 2)),
    ((3, 2, 1), (4, 1, 1)),
    ((3, 2, 1), (4,)),
)


def fig_state():
    return PlaneState(STD, 0, FIG_LAYERS)


class TestLayerOrder:
    def test_figure_chain_holds_linkwise(self):
        pairs = [pair(l, m) for l, m in FIG_LAYERS]
        for a, b in zip(pairs, pairs[1:]):
            assert layer_dominates(STD, 0, a, b)
            assert not layer_dominates(STD, 0, b, a)
        for p in pairs:
            assert layer_dominates(STD, 0, p, pair((), ()))

    def test_strict_length_drops(self):
        big = pair((3, 1), (2,))
        assert not layer_dominates(STD, 0, big, pair((2, 1), ()))
        assert layer_dominates(STD, 0, big, pair((2,), ()))

    def test_equality_needs_opposite_sign(self):
        # s(0 + 2) = +1 = -s(0), so a 2 may repeat down the stack
        assert layer_dominates(STD, 0, pair((2,), (1,)), pair((2,), ()))
        # s(0 + 4) = -1 = s(0), so a 4 may not
        assert not layer_dominates(STD, 0, pair((4,), (1,)), pair((4,), ()))
        assert layer_dominates(STD, 0, pair((4,), (1,)), pair((3,), ()))
        # mu side mirrors with s(j - mu_i): s(-2) = +1, s(-1) = -1
        assert layer_dominates(STD, 0, pair((2,), (2,)), pair((1,), (2,)))
        assert not layer_dominates(STD, 0, pair((2,), (1,)), pair((1,), (1,)))

    def test_infinite_prefixes_compare(self):
        top = pair((INF, INF), (INF, INF))
        mid = pair((INF, 2), (INF, 2))
        bot = pair((3, 2), (3, 2))
        assert layer_dominates(STD, 2, top, mid)
        assert layer_dominates(STD, 2, mid, bot)
        assert not layer_dominates(STD, 2, bot, mid)

    def test_transitive_on_admissible_stacks(self):
        fam = FockFamily("pure", STD, node=0, sign=-STD.s(0))
        pool = [(s.lam, s.mu) for s in enumerate_states(fam, 3)]
        for a, b, c in itertools.permutations(pool, 3):
            if layer_dominates(STD, 0, a, b) and layer_dominates(STD, 0, b, c):
                assert layer_dominates(STD, 0, a, c)

    def test_color_counts_and_comparability(self):
        both = pair((3, 2), (3, 2))
        assert pair_color_counts(STD, 0, both) == (2, 2, 2, 2, 2)
        assert pair_color_counts(STD, 2, both) == (2, 2, 2, 2, 2)
        assert is_colorless_self_comparable(STD, 0, both)
        assert is_colorless_self_comparable(STD, 2, both)
        assert not is_colorless_self_comparable(STD, 1, both)
        skew = pair((2,), (1,))
        assert not is_colorless_self_comparable(STD, 0, skew)


class TestPlaneState:
    def test_figure_is_valid(self):
        st = fig_state()
        assert plane_error(st) is None
        assert is_valid_plane(st)

    def test_chain_equals_cell_rule(self):
        # gravity plus facet conditions, computed on raw 3d cells, must
        # reproduce the pairwise chain on arbitrary stacks
        fam = FockFamily("pure", STD, node=0, sign=-STD.s(0))
        pool = [(s.lam, s.mu) for s in enumerate_states(fam, 4)]
        seen = valid = 0
        for k in (1, 2, 3):
            for combo in itertools.product(pool, repeat=k):
                if sum(l.size + m.size for l, m in combo) > 5:
                    continue
                st = PlaneState(STD, 0, combo)
                assert is_valid_plane(st) == vertical_rule_check(st)
                seen += 1
                valid += is_valid_plane(st)
        assert seen > 250 and 0 < valid < seen

    def test_broken_chain_detected(self):
        st = PlaneState(STD, 0, (((1,), ()), ((1,), ())))
        assert not is_valid_plane(st)
        assert "dominate" in plane_error(st)

    def test_degree_vector_of_figure(self):
        st = fig_state()
        assert plane_degree_vector(st) == (17, 18, 16, 14, 13)
        assert plane_degree(st) == 78

    def test_contains_box_walks_layers(self):
        st = fig_state()
        assert contains_box(st, (0, 0, 0))
        assert contains_box(st, (0, 4, 0))       # lam row 1 of layer 1
        assert not contains_box(st, (0, 5, 0))
        assert contains_box(st, (4, 0, 0))       # mu column 1 reaches a=4
        assert contains_box(st, (0, 0, 3))
        assert not contains_box(st, (0, 0, 4))

    def test_trailing_vacuum_layers_trim(self):
        st = PlaneState(STD, 0, (((1,), ()), ((), ()), ((), ())))
        assert st.layers == (pair((1,), ()),)

    def test_json_round_trip(self):
        for st in (fig_state(),
                   boundary_vacuum(STD, 0, (3, 2), (3, 2), (3, 2, 2, 1)),
                   boundary_vacuum(STD, 0, forbidden=((0, 0, 1),))):
            data = plane_to_json(st)
            assert plane_from_json(STD, data) == st

    def test_render_mentions_every_layer(self):
        text = render_plane(fig_state())
        assert "layer 4" in text and "(3,2,1)" in text


class TestBoundary:
    def test_colorless_nodes_accept_the_pair(self):
        g = gp(3, 2)
        for node in (0, 2, 4):
            assert boundary_error(STD, node, g, g, gp()) is None
        for node in (1, 3):
            assert boundary_error(STD, node, g, g, gp()) is not None

    def test_unbalanced_pair_rejected(self):
        err = boundary_error(STD, 0, gp(2), gp(1), gp())
        assert err is not None

    def test_vacuum_tail_layers(self):
        vac = boundary_vacuum(STD, 0, (3, 2), (3, 2), (3, 2, 2, 1))
        assert vac.layers == (pair((), ()), pair((), ()), pair((), ()),
                              pair((2,), (2,)))
        assert vacuum_pair(vac, 4) == pair((2,), (2,))
        assert vacuum_pair(vac, 5) == pair((3, 2), (3, 2))
        assert layer_pair(vac, 7) == pair((3, 2), (3, 2))

    def test_generalized_pairs_carry_infinite_prefix(self):
        vac = boundary_vacuum(STD, 0, (3, 2), (3, 2), (3, 2, 2, 1))
        lam, mu = generalized_pair(vac, 4)
        assert lam.parts == (INF, 2) and mu.parts == (INF, 2)

    def test_shift_exponents(self):
        vac = boundary_vacuum(STD, 0, (3, 2), (3, 2), (3, 2, 2, 1))
        assert [shift_exponent(vac, t) for t in range(1, 8)] == \
            [3, 1, 0, -2, -4, -5, -6]

    def test_forbidden_cell_inside_vacuum_rejected(self):
        with pytest.raises(ValueError, match="vacuum"):
            boundary_vacuum(STD, 0, (3, 2), (3, 2), (), ((0, 0, 0),))

    def test_alpha_must_fit_admissibly(self):
        assert boundary_error(STD, 2, gp(3, 2), gp(3, 2), gp(2, 1)) is None


class TestEnumeration:
    def test_plain_graded_counts(self):
        assert graded_plane_counts(STD, 0, 10) == \
            [1, 1, 2, 5, 8, 16, 29, 50, 88, 150, 254]
        assert graded_plane_counts(STD, 1, 8) == \
            [1, 1, 3, 6, 12, 23, 42, 77, 136]
        assert graded_plane_counts(STD, 4, 8) == \
            [1, 1, 3, 6, 11, 22, 40, 72, 127]

    def test_forbidden_cell_cuts_to_fock_counts(self):
        assert graded_plane_counts(STD, 0, 10, forbidden=((0, 0, 1),)) == \
            [1, 1, 2, 4, 6, 10, 15, 22, 33, 48, 70]
        assert graded_plane_counts(STD, 0, 8, forbidden=((1, 1, 0),)) == \
            [1, 1, 2, 4, 6, 10, 16, 25, 38]

    def test_boundary_graded_counts(self):
        assert graded_plane_counts(STD, 0, 4, gamma=(3, 2), epsilon=(3, 2),
                                   alpha=(3, 2, 2, 1)) == [1, 6, 24, 82, 246]
        assert graded_plane_counts(STD, 0, 4, gamma=(3, 2),
                                   epsilon=(3, 2)) == [1, 3, 9, 23, 52]
        assert graded_plane_counts(STD, 0, 4, alpha=(2,)) == [1, 2, 5, 13, 27]

    def test_enumeration_is_sorted_and_valid(self):
        states = enumerate_plane(STD, 0, 4)
        assert len(states) == len(set(states))
        degrees = [plane_degree(st) for st in states]
        assert degrees == sorted(degrees)
        for st in states:
            assert plane_error(st) is None

    def test_boundary_enumeration_dominates_vacuum(self):
        vac = boundary_vacuum(STD, 0, (3, 2), (3, 2), (3, 2, 2, 1))
        for st in enumerate_plane(STD, 0, 2, gamma=(3, 2), epsilon=(3, 2),
                                  alpha=(3, 2, 2, 1)):
            assert st.gamma == vac.gamma and st.alpha == vac.alpha
            assert plane_degree(st) >= 0


class TestEigenvalues:
    def test_empty_vacuum_is_f_zero(self):
        want = f_factor(0, ONE)
        for par, node in ((STD, 0), (STD, 2), (ALT, 0)):
            vac = boundary_vacuum(par, node)
            for i in range(par.N):
                expect = want if i == node else SpectralFunction.one()
                assert macmahon_k_eigenvalue(vac, i) == expect
                assert macmahon_k_eigenvalue(vac, i, engine="boxes") == expect

    def test_boundary_vacuum_corner_eigenvalues(self):
        vac = boundary_vacuum(STD, 0, (3, 2), (3, 2), (3, 2, 2, 1))
        q1h = monomial(q=Fraction(-1, 2), d=Fraction(1, 2))
        q3h = monomial(q=Fraction(-1, 2), d=Fraction(-1, 2))
        goldens = {
            0: psi(1, qpow(6)) * f_factor(-1, ONE),
            1: SpectralFunction.build(Q, [(qpow(-2) * Q1**-1, 1)])
               / SpectralFunction.build(qpow(4), [(qpow(-8), 1)])
               * SpectralFunction.constant(q1h),
            # the circulating version prints both arguments shifted by one
            2: psi(1, Q1**-2 * Q2**-2) * psi(1, Q3 * Q2**-2),
            3: SpectralFunction.build(
                   ONE, [(Q2**-1 * Q3**2, 1), (Q2**-4 * Q1**-3, -1)])
               * SpectralFunction.constant(q3h),
            4: SpectralFunction.one(),
        }
        table = plane_eigenvalue_table(vac)
        boxes = plane_eigenvalue_table(vac, engine="boxes")
        for i, want in goldens.items():
            assert table[i] == want
            assert boxes[i] == want

    def test_engines_agree_everywhere(self):
        cases = [
            (STD, 0, dict(), 3),
            (ALT, 2, dict(), 3),
            (STD, 2, dict(gamma=(3, 2), epsilon=(3, 2)), 1),
        ]
        for par, node, kw, budget in cases:
            for st in enumerate_plane(par, node, budget, **kw):
                for i in range(par.N):
                    assert macmahon_k_eigenvalue(st, i) == \
                        macmahon_k_eigenvalue(st, i, engine="boxes")

    def test_stacks_equal_shifted_layer_products(self):
        # relative to the vacuum the infinite tail telescopes away, so
        # the eigenvalue is the vacuum one times finitely many layer ratios
        from spart.fock_action import k_eigenvalue
        from spart.spart_states import pure_state
        empty = pure_state(STD, 1, 0, (), ())
        for st in enumerate_plane(STD, 0, 4):
            if len(st.layers) < 2:
                continue
            for i in range(5):
                want = f_factor(0, ONE) if i == 0 else SpectralFunction.one()
                for t, (lam, mu) in enumerate(st.layers, start=1):
                    ratio = k_eigenvalue(
                        pure_state(STD, 1, 0, lam.parts, mu.parts), i) \
                        / k_eigenvalue(empty, i)
                    want = want * ratio.substitute_x_scale(
                        qpow(2 * (t - 1) * STD.s(0)))
                assert macmahon_k_eigenvalue(st, i) == want


class TestLadders:
    def test_f_then_e_on_the_vacuum(self):
        vac = boundary_vacuum(STD, 0)
        fc = plane_ladder_coeffs(vac, 0, "F")
        assert [(c.box, c.support) for c in fc] == [((0, 0, 0), ONE)]
        assert fc[0].scalar == ScalarExpr.build(monomial(-1))
        ec = plane_ladder_coeffs(fc[0].target, 0, "E")
        want = ScalarExpr.build(monomial(-1) * Q * KMON**-1,
                                [(KMON**2, 1), (Q**2, -1)])
        assert [(c.box, c.scalar) for c in ec] == [((0, 0, 0), want)]
        for i in (1, 2, 3, 4):
            assert plane_ladder_coeffs(vac, i, "F") == []
            assert plane_ladder_coeffs(vac, i, "E") == []

    def test_one_box_state_f_targets(self):
        one = plane_ladder_coeffs(boundary_vacuum(STD, 0), 0, "F")[0].target
        f1 = plane_ladder_coeffs(one, 1, "F")
        assert [(c.box, c.scalar) for c in f1] == \
            [((0, 1, 0), ScalarExpr.build(monomial(1)))]
        f4 = plane_ladder_coeffs(one, 4, "F")
        assert [(c.box, c.scalar) for c in f4] == \
            [((1, 0, 0), ScalarExpr.build(monomial(-1)))]
        assert plane_ladder_coeffs(one, 0, "F") == []

    def test_targets_are_exactly_the_chain_moves(self):
        for st in enumerate_plane(STD, 0, 3):
            for i in range(5):
                assert {c.box for c in plane_ladder_coeffs(st, i, "F")} == \
                    {b for _, b in add_plane_moves(st, i)}
                assert {c.box for c in plane_ladder_coeffs(st, i, "E")} == \
                    {b for _, b in remove_plane_moves(st, i)}

    def test_k_ladder_ratio_law(self):
        cases = [
            (STD, 0, dict(), 2),
            (ALT, 0, dict(), 2),
            (STD, 0, dict(gamma=(3, 2), epsilon=(3, 2), alpha=(2, 1)), 1),
        ]
        for par, node, kw, budget in cases:
            for st in enumerate_plane(par, node, budget, **kw):
                for j in range(par.N):
                    for gen in ("E", "F"):
                        for c in plane_ladder_coeffs(st, j, gen):
                            for i in range(par.N):
                                A = par.cartan(i, j)
                                M = par.twist_m(i, j)
                                num = linear(monomial(d=M) * qpow(A),
                                             c.support)
                                den = linear(monomial(d=M), qpow(A) * c.support)
                                fac = num / den if gen == "E" else den / num
                                ratio = macmahon_k_eigenvalue(c.target, i) \
                                    / macmahon_k_eigenvalue(st, i)
                                assert ratio == fac

    def test_degree_moves_by_one_in_the_right_color(self):
        for st in enumerate_plane(STD, 0, 3):
            d0 = plane_degree_vector(st)
            for i in range(5):
                for gen, delta in (("F", 1), ("E", -1)):
                    for c in plane_ladder_coeffs(st, i, gen):
                        d1 = plane_degree_vector(c.target)
                        diff = [a - b for a, b in zip(d1, d0)]
                        assert diff[i] == delta
                        assert sum(abs(x) for x in diff) == 1

    def test_rejects_invalid_state_and_bad_gen(self):
        bad = PlaneState(STD, 0, (((1,), ()), ((1,), ())))
        with pytest.raises(ValueError):
            plane_ladder_coeffs(bad, 0, "F")
        with pytest.raises(ValueError):
            plane_ladder_coeffs(boundary_vacuum(STD, 0), 0, "X")


class TestResonantQuotient:
    def test_e_coefficient_vanishes_at_the_resonant_point(self):
        double = PlaneState(STD, 0, (((1,), (1,)), ((1,), ())))
        hook = PlaneState(STD, 0, (((2, 1), (1,)),))
        grid = {
            (double, (0, 0, 1), Q):
                ScalarExpr.build(monomial(-1) * KMON,
                                 [(Q**2 * KMON**-2, 1), (Q**2, -1)]),
            (hook, (1, 1, 0), Q**-1):
                ScalarExpr.build(Q * KMON**-1,
                                 [(Q**2 * KMON**2, 1), (qpow(4), -1)]),
        }
        for (st, box, point), want in grid.items():
            hits = [c for c in plane_ladder_coeffs(st, 0, "E")
                    if c.box == box]
            assert len(hits) == 1
            assert hits[0].scalar == want
            assert hits[0].scalar.substitute_K(point).is_zero
            assert not hits[0].scalar.substitute_K(point**-1).is_zero

    def test_f_into_the_cell_is_k_free(self):
        # F keeps the span of configurations containing the cell, so the
        # quotient action only needs the E side zero checked above
        base = PlaneState(STD, 0, (((1,), (1,)),))
        hits = [c for c in plane_ladder_coeffs(base, 0, "F")
                if c.box == (0, 0, 1)]
        assert len(hits) == 1
        assert hits[0].scalar == ScalarExpr.build(monomial(1))

    def test_quotient_ladders_stay_in_the_quotient(self):
        for fb in (((0, 0, 1),), ((1, 1, 0),)):
            for st in enumerate_plane(STD, 0, 3, forbidden=fb):
                for i in range(5):
                    for c in plane_ladder_coeffs(st, i, "F"):
                        assert c.box not in st.forbidden
                        assert c.target.forbidden == st.forbidden
                    for c in plane_ladder_coeffs(st, i, "E"):
                        assert is_valid_plane(c.target)


class TestTableaux:
    def test_figure_columns(self):
        t1, t2 = to_tableaux(fig_state())
        assert t1.columns == ((5, 5, 4, 4), (4, 4, 3, 2), (3, 2, 1), (3, 2, 1))
        assert t2.columns == ((6, 6, 6, 2), (5, 4, 3), (5, 2, 2), (5,))
        assert tableau_error(STD, t1) is None
        assert tableau_error(STD.tableau_parity(), t2) is None
        assert tableau_pair_error(STD, t1, t2) is None

    def test_figure_round_trip_and_degree(self):
        st = fig_state()
        t1, t2 = to_tableaux(st)
        assert from_tableaux(STD, t1, t2) == st
        assert tableau_degree_vector(STD, t1, t2) == (17, 18, 16, 14, 13)

    def test_round_trip_over_enumeration(self):
        for st in enumerate_plane(STD, 0, 5):
            t1, t2 = to_tableaux(st)
            assert tableau_pair_error(STD, t1, t2) is None
            assert from_tableaux(STD, t1, t2) == st
            assert tableau_degree_vector(STD, t1, t2) == \
                plane_degree_vector(st)

    def test_repeat_rules_follow_the_parity(self):
        # row repeats need s(v) = +1, column repeats s(v) = -1
        assert tableau_error(STD, SuperTableau(((1,), (1,)))) is None
        assert tableau_error(STD, SuperTableau(((1, 1),))) is not None
        assert tableau_error(STD, SuperTableau(((4, 4),))) is None
        assert tableau_error(STD, SuperTableau(((4,), (4,)))) is not None
        assert tableau_error(STD, SuperTableau(((2, 1), (1,)))) is None

    def test_pair_needs_interlaced_heights(self):
        t1 = SuperTableau(((1, 1),))
        bad = SuperTableau(((2, 2), (2,)))
        assert tableau_pair_error(STD, t1, bad) is not None
        assert tableau_pair_error(STD, SuperTableau(()), SuperTableau(())) \
            is None

    def test_second_tableau_entries_start_at_two(self):
        assert tableau_pair_error(STD, SuperTableau(((1,),)),
                                  SuperTableau(((1,),))) is not None

    def test_requires_negative_node_parity(self):
        flipped = Parity.from_string("-++++")
        st = PlaneState(flipped, 0, ())
        with pytest.raises(ValueError):
            to_tableaux(st)

    def test_boundary_states_have_no_tableaux(self):
        vac = boundary_vacuum(STD, 0, (3, 2), (3, 2))
        with pytest.raises(ValueError):
            to_tableaux(vac)
