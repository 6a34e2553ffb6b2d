"""Plane curve configurations and Kummer-cover transport.

Configurations are combinatorial: a degree, component summaries, and a
list of singular clusters with placement tags saying where they sit
relative to the coordinate triangle (generic, at a coordinate vertex, or
at a generic point of a coordinate line).  The Kummer endomorphism
[x:y:z] -> [x^k:y^k:z^k] transports this data; the local clusters at
tagged points are pulled back exactly by the local engine using the
monomial germs (x^k, y^k) and (x^k, y).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

from .clusters import (WeightedMultiCluster, cluster_from_json,
                       cluster_to_json, self_intersection, single_point,
                       chain_cluster)
from .errors import EmptyCluster, HypothesisViolated, PlacementConflict
from .field import QQ, BiPoly
from .localeng import LocalMap, monomial_map, pullback_cluster

GENERIC = "generic"
VERTEX = "vertex"
LINE = "line"


@dataclass(frozen=True)
class SingularSpec:
    cluster: WeightedMultiCluster
    count: int
    placement: str = GENERIC


@dataclass(frozen=True)
class KummerSpec:
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("Kummer exponent must be >= 2")


@dataclass(frozen=True)
class PlaneConfig:
    """degree, components [(deg, count)], singular clusters, and the number
    of coordinate vertices sitting at smooth points of the curve."""

    degree: int
    components: tuple
    sing: tuple
    smooth_vertex_marks: int = 0

    def __post_init__(self):
        for s in self.sing:
            if s.placement not in (GENERIC, VERTEX, LINE):
                raise PlacementConflict(f"unknown placement {s.placement!r}")
            if s.count < 1:
                raise PlacementConflict("singular spec with count < 1")
        vertices = (sum(s.count for s in self.sing if s.placement == VERTEX)
                    + self.smooth_vertex_marks)
        if vertices > 3:
            raise PlacementConflict("more than three coordinate vertices used")
        _check_line_pair_budget(self)


def _check_line_pair_budget(c):
    """For arrangements of lines with only ordinary singularities, the
    points must account for every pair of lines."""
    if not c.components or any(deg != 1 for deg, _ in c.components):
        return
    if any(len(s.cluster.forest.nodes) != 1 for s in c.sing):
        return
    n = sum(cnt for _, cnt in c.components)
    pairs = 0
    for s in c.sing:
        m = s.cluster.weights[s.cluster.forest.nodes[0].id]
        pairs += s.count * m * (m - 1) // 2
    if pairs != n * (n - 1) // 2:
        raise PlacementConflict(
            f"line-pair budget {pairs} != C({n},2) = {n * (n - 1) // 2}")


def sigma_m2(c):
    return sum(s.count * self_intersection(s.cluster) for s in c.sing)


def mult_size(c):
    return sum(s.count * s.cluster.size() for s in c.sing)


def h_index(c):
    """Harbourne index h(C) = H(C, Mult(C))."""
    n = mult_size(c)
    if n < 1:
        raise EmptyCluster("configuration has no singular points")
    return Fraction(c.degree ** 2 - sigma_m2(c), n)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def triangle():
    """Three concurrent lines in general position w.r.t. the coordinate
    triangle; each coordinate vertex lies on one line (smoothly)."""
    return PlaneConfig(
        degree=3,
        components=((1, 3),),
        sing=(SingularSpec(single_point(3), 1, GENERIC),),
        smooth_vertex_marks=3)


def fermat(k):
    """The k-th Fermat arrangement of 3k lines."""
    if k < 2:
        raise ValueError("Fermat arrangement needs k >= 2")
    return PlaneConfig(
        degree=3 * k,
        components=((1, 3 * k),),
        sing=(SingularSpec(single_point(3), k * k, GENERIC),
              SingularSpec(single_point(k), 3, VERTEX)))


def wiman(vertex_triples=0):
    """Wiman's arrangement of 45 lines: 120 triple, 45 quadruple and 36
    quintuple ordinary points.  Optionally tag up to three of the triple
    points as coordinate vertices."""
    if not 0 <= vertex_triples <= 3:
        raise PlacementConflict("at most three triple points can be vertices")
    sing = []
    if vertex_triples < 120:
        sing.append(SingularSpec(single_point(3), 120 - vertex_triples,
                                 GENERIC))
    if vertex_triples:
        sing.append(SingularSpec(single_point(3), vertex_triples, VERTEX))
    sing.append(SingularSpec(single_point(4), 45, GENERIC))
    sing.append(SingularSpec(single_point(5), 36, GENERIC))
    return PlaneConfig(degree=45, components=((1, 45),), sing=tuple(sing))


def klein_lines():
    """Klein's arrangement of 21 lines (21 quadruple + 28 triple points)."""
    return PlaneConfig(
        degree=21,
        components=((1, 21),),
        sing=(SingularSpec(single_point(4), 21, GENERIC),
              SingularSpec(single_point(3), 28, GENERIC)))


def klein_polars():
    """The union of the 21 polars of the Klein quartic's bitangent-like
    configuration: degree 63 with 42 nodes, 252 triple and 189 quadruple
    ordinary points."""
    return PlaneConfig(
        degree=63,
        components=((3, 21),),
        sing=(SingularSpec(single_point(2), 42, GENERIC),
              SingularSpec(single_point(3), 252, GENERIC),
              SingularSpec(single_point(4), 189, GENERIC)))


# ---------------------------------------------------------------------------
# Kummer transport
# ---------------------------------------------------------------------------

def kummer_pullback(c, s, seed=0):
    """Transport a configuration through the degree-k^2 Kummer cover.

    Generic singular points get k^2 isomorphic copies; a point at a
    coordinate vertex has one preimage with the cluster pulled back under
    (x^k, y^k); a point on a coordinate line has k preimages pulled back
    under (x^k, y); a coordinate vertex at a smooth point contributes one
    ordinary point of multiplicity k.
    """
    k = s.k
    new_sing = []
    for sp in c.sing:
        if sp.placement == GENERIC:
            new_sing.append(SingularSpec(sp.cluster, sp.count * k * k))
        elif sp.placement == VERTEX:
            pb = pullback_cluster(monomial_map(k, k), sp.cluster, seed)
            if self_intersection(pb) != k * k * self_intersection(sp.cluster):
                raise PlacementConflict(
                    "vertex pullback square does not scale by deg f = k^2")
            new_sing.append(SingularSpec(pb, sp.count))
        else:
            x = BiPoly.variable("x", QQ)
            y = BiPoly.variable("y", QQ)
            pb = pullback_cluster(LocalMap.from_polys(x ** k, y),
                                  sp.cluster, seed)
            if self_intersection(pb) != k * self_intersection(sp.cluster):
                raise PlacementConflict(
                    "line pullback square does not scale by deg f = k")
            new_sing.append(SingularSpec(pb, sp.count * k))
    if c.smooth_vertex_marks:
        pb = pullback_cluster(monomial_map(k, k), single_point(1), seed)
        if self_intersection(pb) != k * k:
            raise PlacementConflict(
                "smooth vertex pullback square is not k^2")
        new_sing.append(SingularSpec(pb, c.smooth_vertex_marks))
    return PlaneConfig(
        degree=k * c.degree,
        components=tuple((deg * k, cnt) for deg, cnt in c.components),
        sing=tuple(new_sing))


def theorem_b_family(k, seed=0):
    """h of the Kummer pullback of Wiman's arrangement with three of the
    triple points placed at the coordinate vertices."""
    if k < 2:
        raise ValueError("family starts at k = 2")
    return h_index(kummer_pullback(wiman(vertex_triples=3), KummerSpec(k),
                                   seed))


def pullback_theorem_check(c, s, seed=0):
    """(H(f*C, f*K), H(C, K), strict_expected) for K = Mult(C).

    Smooth vertex marks are not part of K, so their preimages are left
    out of the pulled-back cluster.  Strictness is guaranteed when a
    vertex placement sits over a cluster point: there the local germ
    (x^k, y^k) has multiplicity k > 1.  The germ (x^k, y) at a generic
    point of a coordinate line has multiplicity 1, so line placements do
    not, by themselves, force a strict drop.
    """
    rhs = h_index(c)
    if rhs > 0:
        raise HypothesisViolated("the theorem needs H(C, K) <= 0")
    stripped = replace(c, smooth_vertex_marks=0)
    new = kummer_pullback(stripped, s, seed)
    lhs = h_index(new)
    strict_expected = any(sp.placement == VERTEX for sp in c.sing)
    return lhs, rhs, strict_expected


def strict_gap_demo(c, k, variant="smooth", seed=0):
    """A Kummer cover that strictly lowers the Harbourne index.

    variant 'smooth': pick a fresh coordinate triangle with its three
    vertices at smooth points of C (needs -k^2 < h(C) < 0); the old
    placements become generic under the new coordinates.  variant
    'vertex': move one ordinary singular point to a coordinate vertex.
    """
    old_h = h_index(c)
    if old_h >= 0:
        raise HypothesisViolated("needs a configuration with h < 0")
    if variant == "smooth":
        if Fraction(-k * k) >= old_h:
            raise HypothesisViolated("needs -k^2 < h(C)")
        sing = tuple(replace(sp, placement=GENERIC) for sp in c.sing)
        tagged = replace(c, sing=sing, smooth_vertex_marks=3)
    elif variant == "vertex":
        sing = list(c.sing)
        idx = next((i for i, sp in enumerate(sing)
                    if sp.placement == GENERIC
                    and len(sp.cluster.forest.nodes) == 1), None)
        if idx is None:
            raise PlacementConflict("no ordinary generic point to tag")
        sp = sing[idx]
        if sp.count > 1:
            sing[idx] = replace(sp, count=sp.count - 1)
            sing.insert(idx + 1, SingularSpec(sp.cluster, 1, VERTEX))
        else:
            sing[idx] = replace(sp, placement=VERTEX)
        tagged = replace(c, sing=tuple(sing))
    else:
        raise ValueError("variant must be 'smooth' or 'vertex'")
    new = kummer_pullback(tagged, KummerSpec(k), seed)
    new_h = h_index(new)
    return new, old_h, new_h


def h_bound_gap(c, k):
    """Exact value of h(C) k^2 |K| / (k^2 |K| + 3) - 3 k^2 / (k^2 |K| + 3)
    together with its k -> infinity limit h(C) - 3/|K|."""
    h = h_index(c)
    n = mult_size(c)
    k2n = k * k * n
    value = (h * k2n - 3 * k * k) / Fraction(k2n + 3)
    limit = h - Fraction(3, n)
    return value, limit


# ---------------------------------------------------------------------------
# Klein configurations and the recursion of section 3.3
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KleinState:
    """Exact per-family bookkeeping for the cluster K_k: label, total
    square, and the submultiplicativity bound on the point count."""
    k: int
    families: tuple  # of (label, square, size_bound)

    @property
    def square(self):
        return sum(sq for _, sq, _ in self.families)

    @property
    def size_bound(self):
        return sum(sz for _, _, sz in self.families)


def klein_S_cluster(k):
    """The totally ordered cluster S_{p,k} at one of the 42 base points:
    weights k+1, k, then 4 * 3^(k-m-1) points of weight m for m = k-1..2."""
    if k < 2:
        raise ValueError("S clusters start at k = 2")
    weights = [k + 1, k]
    for m in range(k - 1, 1, -1):
        weights.extend([m] * (4 * 3 ** (k - m - 1)))
    return chain_cluster(weights)


def _s_square(level):
    """Sum of squared weights of S_{p,level} at one point."""
    if level == 1:
        return 4
    return self_intersection(klein_S_cluster(level))


def _s_size(level):
    if level == 1:
        return 1
    return klein_S_cluster(level).size()


def klein_T_square():
    """T = 252 triple + 189 quadruple points of the polar configuration."""
    return 252 * 9 + 189 * 16


def klein_state(k):
    if k < 2:
        raise ValueError("the recursion starts at k = 2")
    families = [("S_k", 42 * _s_square(k), 42 * _s_size(k))]
    for level in range(k - 1, 0, -1):
        j = k - 1 - level
        families.append((f"f^{j}* S_{level}^X",
                         9 ** j * 6 * 42 * _s_square(level),
                         9 ** j * 6 * 42 * _s_size(level)))
    families.append((f"f^{k - 1}* T",
                     9 ** (k - 1) * klein_T_square(),
                     9 ** (k - 1) * 441))
    return KleinState(k, tuple(families))


def klein_recursion(k):
    """(K2, size bound, h bound) for the cluster K_k from the component
    recursion: squares and size bounds scale by 9 per pullback, and the
    split at the 42 base points multiplies the S-families by 6."""
    st = klein_state(k)
    k2 = st.square
    size = st.size_bound
    degree = 21 * 3 ** k
    return k2, size, Fraction(degree * degree - k2, size)


def klein_closed_forms(k):
    """The closed forms printed in the source for K_k^2 and |K_k|,
    evaluated verbatim (they disagree with the component sums)."""
    k2_paper = Fraction(21, 2) * (53 * 9 ** k + 3) - 196 * 3 ** (k + 1)
    size_paper = Fraction(84 * 9 ** k - 28 * 3 ** (k + 1))
    return k2_paper, size_paper


def klein_report(k):
    """Recursion values next to the printed closed forms, with an explicit
    discrepancy flag whenever they differ."""
    k2, size, h = klein_recursion(k)
    k2_paper, size_paper = klein_closed_forms(k)
    return {
        "k": k,
        "K2_recursion": k2,
        "size_recursion": size,
        "h_bound": h,
        "K2_closed_form": k2_paper,
        "size_closed_form": size_paper,
        "discrepancy": (k2 != k2_paper) or (size != size_paper),
    }


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def config_to_json(c):
    return {
        "degree": c.degree,
        "components": [{"deg": d, "count": n} for d, n in c.components],
        "sing": [{"cluster": cluster_to_json(s.cluster), "count": s.count,
                  "placement": s.placement} for s in c.sing],
        "smooth_vertex_marks": c.smooth_vertex_marks,
    }


def config_from_json(data):
    sing = tuple(SingularSpec(cluster_from_json(s["cluster"]), s["count"],
                              s.get("placement", GENERIC))
                 for s in data["sing"])
    comps = tuple((cp["deg"], cp["count"]) for cp in data["components"])
    return PlaneConfig(degree=data["degree"], components=comps, sing=sing,
                       smooth_vertex_marks=data.get("smooth_vertex_marks", 0))


def config_key(c):
    return json.dumps(config_to_json(c), sort_keys=True)
