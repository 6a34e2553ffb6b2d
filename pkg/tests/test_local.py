"""Blowups, multiplicity clusters, base points and pullbacks."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enriques import (QQ, BiPoly, BlowupChart, ContractedCurvePresent, Germ,
                      HypothesisViolated, LocalMap, NonReducedGerm,
                      base_points, chain_cluster, curves_through, fixed_part,
                      germ_mult, intersection_multiplicity, is_consistent,
                      local_degree, map_multiplicity, monomial_map,
                      mult_cluster, noether_intersection, pullback_cluster,
                      self_intersection, shared_cluster, single_point,
                      strict_transform)

X = BiPoly.variable("x")
Y = BiPoly.variable("y")


def weight_list(k):
    """Weights in canonical (depth-first, ancestor-first) order."""
    return [k.weights[n.id] for n in k.forest.nodes]


def satellite_count(k):
    return sum(1 for n in k.forest.nodes if n.second_proximity is not None)


class TestGermMult:
    def test_cusp(self):
        assert germ_mult(Germ(X ** 2 + Y ** 3)) == 2

    def test_three_lines(self):
        assert germ_mult(Germ((X - Y) * Y * X)) == 3

    def test_smooth(self):
        assert germ_mult(Germ(Y + X ** 2)) == 1

    def test_nonvanishing_rejected(self):
        with pytest.raises(ValueError):
            Germ(X + 1)


class TestStrictTransform:
    def test_cusp_resolves_in_one_step(self):
        g = strict_transform(Germ(Y ** 2 - X ** 3), BlowupChart("x"))
        assert g.poly == Y ** 2 - X

    def test_node_separates(self):
        g = strict_transform(Germ(X * Y), BlowupChart("x"))
        assert g.order() == 1

    def test_smooth_stays_smooth(self):
        g = strict_transform(Germ(Y + X ** 2), BlowupChart("x"))
        assert g.poly == Y + X

    def test_direction_shift(self):
        # branch along y = x: after moving the direction to the origin the
        # transform picks up the shifted tangent
        g = strict_transform(Germ(Y - X), BlowupChart("x", Fraction(1)))
        assert g.poly == Y


class TestMultCluster:
    def test_node(self):
        k = mult_cluster(Germ(X * Y))
        assert weight_list(k) == [2]

    def test_tacnode(self):
        k = mult_cluster(Germ((Y - X ** 2) * (Y + X ** 2)))
        assert weight_list(k) == [2, 2]
        assert satellite_count(k) == 0

    def test_ordinary_triple(self):
        k = mult_cluster(Germ(X * Y * (X + Y)))
        assert weight_list(k) == [3]

    def test_cusp(self):
        k = mult_cluster(Germ(Y ** 2 - X ** 3))
        assert weight_list(k) == [2]

    def test_ramphoid_like(self):
        # (y - x^2)(y + x^2)(y - 2x^2): three branches with pairwise contact 2
        k = mult_cluster(Germ((Y - X ** 2) * (Y + X ** 2) * (Y - 2 * X ** 2)))
        assert weight_list(k) == [3, 3]

    def test_smooth_is_empty(self):
        k = mult_cluster(Germ(Y - X ** 5))
        assert weight_list(k) == []

    def test_non_reduced_rejected(self):
        with pytest.raises(NonReducedGerm):
            mult_cluster(Germ(X ** 2))

    def test_irrational_tangents_share_an_orbit(self):
        k = mult_cluster(Germ((Y ** 2 - 2 * X ** 2) * X))
        assert weight_list(k) == [3]

    def test_always_consistent(self):
        for p in (X * Y, Y ** 2 - X ** 3, Y ** 2 - X ** 5,
                  (Y - X ** 2) * (Y + X ** 3), X ** 3 - Y ** 4,
                  (Y ** 2 - X ** 3) * (Y + X)):
            assert is_consistent(mult_cluster(Germ(p)))


class TestMapBasics:
    def test_map_multiplicity(self):
        assert map_multiplicity(monomial_map(2, 3)) == 2
        assert map_multiplicity(monomial_map(1, 2)) == 1

    def test_multiplicity_splits_over_fixed_part(self):
        d = X + Y
        f = LocalMap.from_polys(X * d, Y * d)
        assert map_multiplicity(f) == 2
        fp, reduced = fixed_part(f)
        assert fp.poly.order() == 1
        assert map_multiplicity(f) == 1 + fp.poly.order()

    def test_fixed_part_monomials(self):
        fp, reduced = fixed_part(LocalMap.from_polys(X ** 2, X * Y))
        assert fp.poly == X
        assert (reduced.f1.poly, reduced.f2.poly) == (X, Y)

    def test_fixed_part_empty(self):
        fp, _ = fixed_part(monomial_map(2, 2))
        assert fp is None

    def test_fixed_part_xy(self):
        fp, reduced = fixed_part(LocalMap.from_polys(X ** 2 * Y, X * Y ** 2))
        assert fp.poly == X * Y
        assert (reduced.f1.poly, reduced.f2.poly) == (X, Y)


class TestBasePoints:
    def test_smooth_pencil(self):
        k = base_points(monomial_map(1, 1))
        assert weight_list(k) == [1]

    def test_tangent_pencil(self):
        k = base_points(monomial_map(1, 2))
        assert weight_list(k) == [1, 1]
        assert satellite_count(k) == 0

    def test_cusp_pencil(self):
        k = base_points(monomial_map(2, 3))
        assert weight_list(k) == [2, 1, 1]
        assert satellite_count(k) == 1
        # the satellite is the last point, proximate to the root
        nodes = k.forest.nodes
        assert nodes[2].second_proximity == nodes[0].id
        assert self_intersection(k) == 6

    def test_consistency(self):
        for a, b in ((1, 1), (1, 4), (2, 2), (2, 3), (3, 4), (4, 4)):
            assert is_consistent(base_points(monomial_map(a, b)))


class TestLocalDegree:
    def test_monomial_grid(self):
        for a in range(1, 5):
            for b in range(a, 5):
                assert local_degree(monomial_map(a, b)) == a * b

    def test_kummer_line_germ(self):
        for k in range(2, 5):
            assert local_degree(monomial_map(k, 1)) == k

    def test_composition_multiplicative(self):
        for (a, b), (c, d) in (((2, 3), (2, 2)), ((1, 2), (3, 3)),
                               ((2, 2), (2, 3))):
            lhs = local_degree(monomial_map(a * c, b * d))
            assert lhs == (local_degree(monomial_map(a, b))
                           * local_degree(monomial_map(c, d)))


class TestIntersectionMultiplicity:
    def test_two_parabolas(self):
        assert intersection_multiplicity(Germ(Y - X ** 2), Germ(Y + X ** 2)) == 2

    def test_transverse_lines(self):
        assert intersection_multiplicity(Germ(X), Germ(Y)) == 1

    def test_common_component(self):
        assert intersection_multiplicity(Germ(X), Germ(X)) == float("inf")
        p, q = Y - X ** 2, Y ** 2 - X ** 3
        assert intersection_multiplicity(Germ(p * q), Germ(p)) == float("inf")

    def test_cusp_against_lines(self):
        cusp = Germ(Y ** 2 - X ** 3)
        assert intersection_multiplicity(cusp, Germ(X)) == 2
        assert intersection_multiplicity(cusp, Germ(Y)) == 3

    def test_symmetry(self):
        pairs = [(Y - X ** 2, Y ** 3 - X ** 2), (X * Y, Y ** 2 - X ** 3),
                 (Y ** 2 - 2 * X ** 2, Y ** 2 - 2 * X ** 2 + X ** 3)]
        for p, q in pairs:
            assert (intersection_multiplicity(Germ(p), Germ(q))
                    == intersection_multiplicity(Germ(q), Germ(p)))


class TestSharedCluster:
    def test_tangent_conics(self):
        a, b = Germ(Y - X ** 2), Germ(Y + X ** 2)
        ka, kb = shared_cluster(a, b)
        assert noether_intersection(ka, kb) == 2

    def test_irrational_shared_tangents(self):
        a = Germ(Y ** 2 - 2 * X ** 2)
        b = Germ(Y ** 2 - 2 * X ** 2 + X ** 3)
        ka, kb = shared_cluster(a, b)
        got = noether_intersection(ka, kb)
        assert got == intersection_multiplicity(a, b)

    def test_matches_resultant_on_samples(self):
        pairs = [(Y ** 2 - X ** 3, Y ** 2 - X ** 5),
                 (Y ** 3 - 2 * X ** 3, Y ** 3 - 2 * X ** 3 + X ** 4),
                 ((Y - X ** 2) * (Y + X ** 2), Y ** 2 - X ** 5),
                 (X * Y, X + Y ** 2)]
        for p, q in pairs:
            a, b = Germ(p), Germ(q)
            im = intersection_multiplicity(a, b)
            ka, kb = shared_cluster(a, b)
            assert im == noether_intersection(ka, kb)


class TestCurvesThrough:
    def test_simple_point(self):
        w, z = curves_through(single_point(1), 0)
        assert intersection_multiplicity(w, z) == 1

    def test_double_point(self):
        k = single_point(2)
        w, z = curves_through(k, 0)
        assert w.order() == 2 and z.order() == 2
        assert intersection_multiplicity(w, z) == 4

    def test_free_chain(self):
        k = chain_cluster([2, 1])
        w, z = curves_through(k, 0)
        assert intersection_multiplicity(w, z) == 5

    def test_satellite_cluster(self):
        k = base_points(monomial_map(2, 3))
        w, z = curves_through(k, 0)
        assert intersection_multiplicity(w, z) == 6

    def test_orbit_rejected(self):
        with pytest.raises(HypothesisViolated):
            curves_through(single_point(2, orbit=2), 0)

    def test_deterministic(self):
        a = curves_through(chain_cluster([2, 2]), 3)
        b = curves_through(chain_cluster([2, 2]), 3)
        assert a[0].poly == b[0].poly and a[1].poly == b[1].poly


class TestPullback:
    def test_identity(self):
        k = chain_cluster([2, 1])
        pb = pullback_cluster(monomial_map(1, 1), k, 0)
        assert weight_list(pb) == [2, 1]
        assert self_intersection(pb) == self_intersection(k)

    def test_double_cover_of_a_point(self):
        pb = pullback_cluster(monomial_map(2, 2), single_point(1), 0)
        assert weight_list(pb) == [2]

    def test_square_scales_by_degree(self):
        for m in (1, 2, 3):
            pb = pullback_cluster(monomial_map(2, 2), single_point(m), 0)
            assert weight_list(pb) == [2 * m]
            assert self_intersection(pb) == 4 * m * m

    def test_contracted_curve_rejected(self):
        f = LocalMap.from_polys(X ** 2, X * Y)
        with pytest.raises(ContractedCurvePresent):
            pullback_cluster(f, single_point(1), 0)

    def test_submultiplicative_strict(self):
        k = chain_cluster([2, 1])
        f = monomial_map(2, 3)
        pb = pullback_cluster(f, k, 0)
        deg = local_degree(f)
        assert self_intersection(pb) == deg * self_intersection(k)
        assert pb.size() < deg * k.size()


@st.composite
def random_germs(draw, max_deg=4):
    deg = draw(st.integers(2, max_deg))
    terms = {}
    for i in range(deg + 1):
        for j in range(deg + 1 - i):
            if i + j < 1:
                continue
            c = draw(st.integers(-3, 3))
            if c:
                terms[(i, j)] = Fraction(c)
    p = BiPoly(QQ, terms)
    if p.is_zero() or p.order() < 1:
        return None
    return p


class TestRandomized:
    @given(random_germs())
    @settings(max_examples=40, deadline=None)
    def test_mult_cluster_consistent(self, p):
        if p is None:
            return
        try:
            k = mult_cluster(Germ(p))
        except NonReducedGerm:
            return
        assert is_consistent(k)
