"""Resolution of plane curve germs and local map germs by blowups.

Everything happens at the origin of a smooth chart.  Blowups use the two
standard charts: for the direction y = c x substitute (x, x(y + c)) and
divide by the exceptional power; for the vertical direction substitute
(xy, y).  Satellite proximities are detected by carrying, through every
substitution, the ids of the cluster points owning the two coordinate
axes of the current chart.

Conjugate directions (roots of an irreducible tangent factor) are kept
as one branch with an orbit size; if later arithmetic discovers that an
optimistically adjoined modulus factors, the branch is redone in each
factor tower (dynamic evaluation).
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import field as F
from .clusters import (Node, WeightedMultiCluster, self_intersection)
from .errors import (BudgetExceeded, ContractedCurvePresent,
                     HypothesisViolated, NonReducedGerm, RetryBudgetExceeded,
                     UnrealizableForest)
from .field import (QQ, BiPoly, Tower, UniPoly, add, branched, from_rational,
                    generator, is_zero, mul, one, pdeg, pgcd, split_directions,
                    zero)

MAX_DEPTH = 64
INF_DIR = "inf"


# ---------------------------------------------------------------------------
# Germs and local maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Germ:
    """A plane curve germ at the origin: a nonzero BiPoly vanishing there."""

    poly: BiPoly

    def __post_init__(self):
        if self.poly.is_zero():
            raise ValueError("zero polynomial is not a germ")
        if self.poly.order() < 1:
            raise ValueError("germ must vanish at the origin")

    @property
    def tower(self):
        return self.poly.tower

    def order(self):
        return self.poly.order()


@dataclass(frozen=True)
class LocalMap:
    """A dominant map germ (f1, f2), both components non-invertible."""

    f1: Germ
    f2: Germ

    @classmethod
    def from_polys(cls, p1, p2):
        return cls(Germ(p1), Germ(p2))


@dataclass(frozen=True)
class BlowupChart:
    """One blowup chart: axis 'x' is (x, x(y+c)), axis 'y' is (xy, y)."""

    axis: str = "x"
    direction: object = Fraction(0)
    tower: Tower = QQ


def monomial_map(a, b, tower=QQ):
    x = BiPoly.variable("x", tower)
    y = BiPoly.variable("y", tower)
    return LocalMap.from_polys(x ** a, y ** b)


# ---------------------------------------------------------------------------
# Chart substitutions
# ---------------------------------------------------------------------------

def _chart_a(p, m, c):
    """p(x, x(y+c)) / x^m for a direction root c in p's tower."""
    tw = p.tower
    out = {}
    czero = is_zero(tw, c)
    for (i, j), coef in p.terms.items():
        if i + j < m:
            raise ValueError("division exponent exceeds vanishing order")
        if czero:
            key = (i + j - m, j)
            out[key] = add(tw, out.get(key, zero(tw)), coef)
            continue
        cpow = one(tw)
        # k runs from j down to 0 so c-powers build up incrementally
        for k in range(j, -1, -1):
            val = mul(tw, coef, mul(tw, from_rational(tw, comb(j, k)), cpow))
            key = (i + j - m, k)
            out[key] = add(tw, out.get(key, zero(tw)), val)
            cpow = mul(tw, cpow, c)
    return BiPoly(tw, out)


def _chart_b(p, m):
    """p(xy, y) / y^m (the vertical direction)."""
    tw = p.tower
    out = {}
    for (i, j), coef in p.terms.items():
        if i + j < m:
            raise ValueError("division exponent exceeds vanishing order")
        key = (i, i + j - m)
        out[key] = add(tw, out.get(key, zero(tw)), coef)
    return BiPoly(tw, out)


def germ_mult(g):
    return g.order()


def strict_transform(g, chart):
    m = g.order()
    p = g.poly if chart.tower == g.tower else g.poly.lift_to(chart.tower)
    if chart.axis == "x":
        c = chart.direction
        if isinstance(c, (int, Fraction)):
            c = from_rational(chart.tower, c)
        return Germ(_chart_a(p, m, c))
    if chart.axis == "y":
        return Germ(_chart_b(p, m))
    raise ValueError("chart axis must be 'x' or 'y'")


def _form_t(p, n):
    """The degree-n form of p as a dense poly in t = y/x, plus its x-power.

    Returns (coeffs, x_mult) or (None, None) when the form is zero.
    """
    tw = p.tower
    cs = [zero(tw)] * (n + 1)
    seen = False
    for (i, j), c in p.terms.items():
        if i + j == n:
            cs[j] = c
            seen = True
    if not seen:
        return None, None
    cs = F.ptrim(tw, cs)
    return cs, n - pdeg(cs)


# ---------------------------------------------------------------------------
# Direction iteration with branch handling
# ---------------------------------------------------------------------------

def _finite_directions(tw, tcoeffs):
    """Split a tangent form into directions; degree-0 forms have none."""
    if not tcoeffs or pdeg(tcoeffs) < 1:
        return []
    return split_directions(UniPoly(tw, tcoeffs))


def _run_direction(tw, d, fn):
    """Run ``fn(tower, root, orbit_factor)`` across the branches of one
    tangent direction, collecting the per-branch node lists."""
    if d.tower == tw:
        return fn(tw, d.root, 1)
    var = d.tower.top_var

    def on_branch(t):
        return fn(t, generator(t), len(t.top_modulus) - 1)

    out = []
    for _, res in branched(d.tower, var, on_branch):
        out.extend(res)
    return out


class _Ids:
    def __init__(self):
        self.n = 0

    def fresh(self):
        self.n += 1
        return f"q{self.n:03d}"


def _entries_to_cluster(entries):
    nodes = [Node(e["id"], e["parent"], e["second"], e["orbit"])
             for e in entries]
    return WeightedMultiCluster(nodes, {e["id"]: e["mult"] for e in entries})


# ---------------------------------------------------------------------------
# Multiplicity cluster of a reduced germ
# ---------------------------------------------------------------------------

def is_squarefree(p):
    gx = p.deriv("x")
    gy = p.deriv("y")
    d = p
    if not gx.is_zero():
        d = F.poly_gcd(d, gx)
    if not gy.is_zero():
        d = F.poly_gcd(d, gy)
    if gx.is_zero() and gy.is_zero():
        return p.total_degree() == 0
    return d.total_degree() == 0


def mult_cluster(g):
    """The cluster of all infinitely near points of multiplicity >= 2."""
    if not is_squarefree(g.poly):
        raise NonReducedGerm("germ has a repeated factor")
    ids = _Ids()
    entries = _mc_rec(g.tower, g.poly, None, None, (None, None), 1, ids, 0)
    return _entries_to_cluster(entries)


def _mc_rec(tw, p, parent, second, markers, orbit, ids, depth):
    if depth > MAX_DEPTH:
        raise BudgetExceeded(f"resolution exceeded {MAX_DEPTH} blowups")
    m = p.order()
    if m < 2:
        return []
    nid = ids.fresh()
    entries = [{"id": nid, "parent": parent, "second": second,
                "orbit": orbit, "mult": m}]
    tco, xmult = _form_t(p, m)
    for d in _finite_directions(tw, tco):
        def go(t, root, ofac, _d=d):
            pp = p if t == tw else p.lift_to(t)
            h = _chart_a(pp, m, root)
            child_second = markers[1] if is_zero(t, root) else None
            return _mc_rec(t, h, nid, child_second,
                           (nid, child_second), orbit * ofac, ids, depth + 1)
        entries.extend(_run_direction(tw, d, go))
    if xmult > 0:
        h = _chart_b(p, m)
        entries.extend(_mc_rec(tw, h, nid, markers[0],
                               (markers[0], nid), orbit, ids, depth + 1))
    return entries


# ---------------------------------------------------------------------------
# Local maps: fixed part, base points, local degree
# ---------------------------------------------------------------------------

def map_multiplicity(f):
    return min(f.f1.order(), f.f2.order())


def fixed_part(f):
    """(contracted curve F or None, reduced map with the gcd removed)."""
    d = F.poly_gcd(f.f1.poly, f.f2.poly)
    if d.total_degree() == 0:
        return None, f
    r1 = F.exact_div(f.f1.poly, d)
    r2 = F.exact_div(f.f2.poly, d)
    contracted = Germ(d) if d.order() >= 1 else None
    if r1.order() >= 1 and r2.order() >= 1:
        return contracted, LocalMap.from_polys(r1, r2)
    return contracted, _ReducedPair(r1, r2)


@dataclass(frozen=True)
class _ReducedPair:
    """Like LocalMap but components may be units (order 0)."""
    p1: BiPoly
    p2: BiPoly


def _reduced_polys(f):
    contracted, red = fixed_part(f)
    if isinstance(red, LocalMap):
        return contracted, red.f1.poly, red.f2.poly
    return contracted, red.p1, red.p2


def base_points(f):
    """The weighted cluster of base points of the pencil of f."""
    cluster, _ = _base_points_full(f)
    return cluster


def _base_points_full(f):
    contracted, p1, p2 = _reduced_polys(f)
    if p1.order() < 1 or p2.order() < 1:
        return (WeightedMultiCluster([], {}), {})
    fpoly = contracted.poly if contracted is not None else None
    ids = _Ids()
    entries = _bp_rec(p1.tower, p1, p2, fpoly, None, None, (None, None),
                      1, ids, 0)
    cluster = _entries_to_cluster(entries)
    fmults = {e["id"]: e["fmult"] for e in entries}
    return cluster, fmults


def _bp_rec(tw, p1, p2, fp, parent, second, markers, orbit, ids, depth):
    if depth > MAX_DEPTH:
        raise BudgetExceeded(f"base point recursion exceeded {MAX_DEPTH} "
                             "blowups; pencil members may share a component")
    nu = min(p1.order(), p2.order())
    fm = 0
    if fp is not None and not fp.is_zero() and fp.terms.get((0, 0)) is None:
        fm = fp.order()
    nid = ids.fresh()
    entries = [{"id": nid, "parent": parent, "second": second,
                "orbit": orbit, "mult": nu, "fmult": fm}]
    l1, xm1 = _form_t(p1, nu)
    l2, xm2 = _form_t(p2, nu)
    if l1 is None and l2 is None:
        raise ValueError("both lowest forms vanish below the pencil order")
    if l1 is None:
        tco = l2
    elif l2 is None:
        tco = l1
    else:
        tco = pgcd(tw, l1, l2)
    inf_shared = ((l1 is None or xm1 > 0) and (l2 is None or xm2 > 0))
    for d in _finite_directions(tw, tco):
        def go(t, root, ofac, _d=d):
            q1 = p1 if t == tw else p1.lift_to(t)
            q2 = p2 if t == tw else p2.lift_to(t)
            h1 = _chart_a(q1, nu, root)
            h2 = _chart_a(q2, nu, root)
            hf = None
            if fp is not None:
                fl = fp if t == tw else fp.lift_to(t)
                hf = _chart_a(fl, fl.order() if fm else 0, root) if fm else fl
            child_second = markers[1] if is_zero(t, root) else None
            return _bp_rec(t, h1, h2, hf, nid, child_second,
                           (nid, child_second), orbit * ofac, ids, depth + 1)
        entries.extend(_run_direction(tw, d, go))
    if inf_shared:
        h1 = _chart_b(p1, nu)
        h2 = _chart_b(p2, nu)
        hf = _chart_b(fp, fp.order()) if (fp is not None and fm) else fp
        entries.extend(_bp_rec(tw, h1, h2, hf, nid, markers[0],
                               (markers[0], nid), orbit, ids, depth + 1))
    return entries


def local_degree(f):
    """deg_p(f) = sum over base points of orbit * (nu^2 + nu * mult(F))."""
    cluster, fmults = _base_points_full(f)
    total = 0
    for n in cluster.forest.nodes:
        nu = cluster.weights[n.id]
        total += n.orbit * (nu * nu + nu * fmults[n.id])
    return total


# ---------------------------------------------------------------------------
# Intersection multiplicity via resultants
# ---------------------------------------------------------------------------

def intersection_multiplicity(a, b):
    """Order at the origin of the intersection of two germs.

    Computed as ord_x Res_y after a coordinate change x -> x + u y drawn
    from a deterministic sequence, accepted only once the leading
    y-coefficients survive at x = 0 and the two restrictions to x = 0
    share no zero besides the origin.  Infinity means a common component
    through the origin.
    """
    tw = a.tower
    pa, pb = a.poly, b.poly
    g = F.poly_gcd(pa, pb)
    if g.total_degree() > 0:
        if g.order() >= 1:
            return math.inf
        pa = F.exact_div(pa, g)
        pb = F.exact_div(pb, g)
        if pa.order() < 1 or pb.order() < 1:
            # the whole germ was the off-origin factor; impossible for germs
            raise ValueError("germ factored into a unit at the origin")
    x = BiPoly.variable("x", tw)
    y = BiPoly.variable("y", tw)
    for u in itertools.count():
        qa = pa.compose(x + u * y, y) if u else pa
        qb = pb.compose(x + u * y, y) if u else pb
        res = _try_resultant_order(tw, qa, qb)
        if res is not None:
            return res
    raise AssertionError("unreachable")


def _restrict_x0(tw, p):
    dy = p.deg_y()
    cs = [p.terms.get((0, j), zero(tw)) for j in range(dy + 1)]
    return F.ptrim(tw, cs)


def _try_resultant_order(tw, qa, qb):
    ra = _restrict_x0(tw, qa)
    rb = _restrict_x0(tw, qb)
    if not ra or not rb:
        return None
    if pdeg(ra) != qa.deg_y() or pdeg(rb) != qb.deg_y():
        return None
    g = pgcd(tw, ra, rb)
    # the only allowed common zero on the axis is the origin: gcd = y^k
    if any(not is_zero(tw, c) for c in g[:-1]):
        return None
    res = F.resultant_y(qa, qb)
    k = F.order_in_x(tw, res)
    if k is None:
        return None
    return k


# ---------------------------------------------------------------------------
# Shared cluster of two germs (Noether's formula)
# ---------------------------------------------------------------------------

def shared_cluster(a, b):
    """Clusters of the common infinitely near points of two coprime germs,
    weighted by each germ's multiplicities, over one shared forest."""
    g = F.poly_gcd(a.poly, b.poly)
    if g.order() >= 1:
        raise ValueError("germs share a component through the origin")
    ids = _Ids()
    entries = _shared_rec(a.tower, a.poly, b.poly, None, None,
                          (None, None), 1, ids, 0)
    nodes = [Node(e["id"], e["parent"], e["second"], e["orbit"])
             for e in entries]
    ka = WeightedMultiCluster(nodes, {e["id"]: e["ma"] for e in entries})
    kb = WeightedMultiCluster(nodes, {e["id"]: e["mb"] for e in entries})
    return ka, kb


def _shared_rec(tw, p1, p2, parent, second, markers, orbit, ids, depth):
    if depth > MAX_DEPTH:
        raise BudgetExceeded(f"shared resolution exceeded {MAX_DEPTH} blowups")
    m1, m2 = p1.order(), p2.order()
    nid = ids.fresh()
    entries = [{"id": nid, "parent": parent, "second": second,
                "orbit": orbit, "ma": m1, "mb": m2}]
    l1, xm1 = _form_t(p1, m1)
    l2, xm2 = _form_t(p2, m2)
    tco = pgcd(tw, l1, l2)
    for d in _finite_directions(tw, tco):
        def go(t, root, ofac, _d=d):
            q1 = p1 if t == tw else p1.lift_to(t)
            q2 = p2 if t == tw else p2.lift_to(t)
            h1 = _chart_a(q1, m1, root)
            h2 = _chart_a(q2, m2, root)
            child_second = markers[1] if is_zero(t, root) else None
            return _shared_rec(t, h1, h2, nid, child_second,
                               (nid, child_second), orbit * ofac, ids,
                               depth + 1)
        entries.extend(_run_direction(tw, d, go))
    if xm1 > 0 and xm2 > 0:
        h1 = _chart_b(p1, m1)
        h2 = _chart_b(p2, m2)
        entries.extend(_shared_rec(tw, h1, h2, nid, markers[0],
                                   (markers[0], nid), orbit, ids, depth + 1))
    return entries


# ---------------------------------------------------------------------------
# Curves through a cluster
# ---------------------------------------------------------------------------

def _cluster_conditions(k):
    """Linear conditions on a general degree-D polynomial for passing
    through the cluster, plus the direction assigned to each node."""
    forest = k.forest
    roots = forest.roots()
    if len(roots) != 1:
        raise HypothesisViolated("cluster must sit over a single proper point")
    for n in forest.nodes:
        if n.orbit != 1:
            raise HypothesisViolated("curves_through needs orbit-1 clusters")
        if k.weights[n.id] < 1:
            raise HypothesisViolated("curves_through needs weights >= 1")
    D = 1 + sum(k.weights[n.id] for n in forest.nodes)
    monos = [(i, j) for i in range(D + 1) for j in range(D + 1 - i)]
    index = {m: c for c, m in enumerate(monos)}
    spoly = {m: {index[m]: Fraction(1)} for m in monos}
    conditions = []
    directions = {}

    def vec_add(target, key, vec, scale):
        dst = target.setdefault(key, {})
        for col, val in vec.items():
            dst[col] = dst.get(col, Fraction(0)) + val * scale
            if dst[col] == 0:
                del dst[col]
        if not dst:
            del target[key]

    def walk(sp, nid, markers):
        nu = k.weights[nid]
        for (i, j), vec in sp.items():
            if i + j < nu and vec:
                conditions.append(dict(vec))
        children = forest.children[nid]
        taken = set()
        free_c = 1
        for cid in children:
            spx = forest.by_id[cid].second_proximity
            if spx is not None:
                if spx == markers[1]:
                    dirc = Fraction(0)
                elif spx == markers[0]:
                    dirc = INF_DIR
                else:
                    raise UnrealizableForest(
                        f"{cid} is satellite to a point not on its chart")
                if dirc in taken:
                    raise UnrealizableForest(
                        f"two satellites at the same direction under {nid}")
            else:
                dirc = Fraction(free_c)
                free_c += 1
            taken.add(dirc)
            directions[cid] = dirc
            out = {}
            if dirc == INF_DIR:
                for (i, j), vec in sp.items():
                    if i + j < nu:
                        continue
                    vec_add(out, (i, i + j - nu), vec, Fraction(1))
                walk(out, cid, (markers[0], nid))
            else:
                c = dirc
                for (i, j), vec in sp.items():
                    if i + j < nu:
                        continue
                    if c == 0:
                        vec_add(out, (i + j - nu, j), vec, Fraction(1))
                    else:
                        for kk in range(j + 1):
                            vec_add(out, (i + j - nu, kk), vec,
                                    Fraction(comb(j, kk)) * c ** (j - kk))
                walk(out, cid, (nid, markers[1] if c == 0 else None))

    walk(spoly, roots[0], (None, None))
    return D, monos, conditions, directions, roots[0]


def _nullspace(rows, ncols):
    mat = [[r.get(c, Fraction(0)) for c in range(ncols)] for r in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [v * inv for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                fac = mat[r][col]
                mat[r] = [a - fac * b for a, b in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -mat[r][fc]
        basis.append(v)
    return basis


def _verify_through(poly, k, directions, root_id):
    forest = k.forest

    def walk(h, nid):
        nu = k.weights[nid]
        if h.is_zero() or h.order() != nu:
            return False
        for cid in forest.children[nid]:
            dirc = directions[cid]
            if dirc == INF_DIR:
                hh = _chart_b(h, nu)
            else:
                hh = _chart_a(h, nu, from_rational(h.tower, dirc))
            if not walk(hh, cid):
                return False
        return True

    return walk(poly, root_id)


_CURVES_CACHE = {}


def curves_through(k, seed):
    """Two seeded germs with multiplicity exactly nu_q at every cluster
    point and no further common point (certified by the intersection
    number equalling K^2).  Results are memoized per (cluster, seed)."""
    import json as _json
    from .clusters import cluster_to_json
    key = (_json.dumps(cluster_to_json(k), sort_keys=True), seed)
    if key in _CURVES_CACHE:
        return _CURVES_CACHE[key]
    result = _curves_through(k, seed)
    _CURVES_CACHE[key] = result
    return result


def _curves_through(k, seed):
    D, monos, conditions, directions, root_id = _cluster_conditions(k)
    basis = _nullspace(conditions, len(monos))
    if len(basis) < 2:
        raise RetryBudgetExceeded(
            "linear system through the cluster has too few solutions")
    rng = random.Random(seed)
    k2 = self_intersection(k)

    def sample():
        coeffs = [Fraction(rng.randint(-10, 10)) for _ in basis]
        terms = {}
        for cvec, b in zip(coeffs, basis):
            if cvec == 0:
                continue
            for col, val in enumerate(b):
                if val != 0:
                    m = monos[col]
                    terms[m] = terms.get(m, Fraction(0)) + cvec * val
        return BiPoly(QQ, {m: v for m, v in terms.items() if v != 0})

    last = None
    for _ in range(32):
        w = sample()
        z = sample()
        if w.is_zero() or z.is_zero():
            last = "sampled the zero polynomial"
            continue
        if not (_verify_through(w, k, directions, root_id)
                and _verify_through(z, k, directions, root_id)):
            last = "sampled member has excess multiplicity at a cluster point"
            continue
        inter = intersection_multiplicity(Germ(w), Germ(z))
        if inter != k2:
            last = (f"intersection {inter} != K^2 = {k2}; "
                    "members share an extra point")
            continue
        return Germ(w), Germ(z)
    raise RetryBudgetExceeded(
        "no certified pair of curves through the cluster", certificate=last)


# ---------------------------------------------------------------------------
# Pullback of a cluster under a finite map germ
# ---------------------------------------------------------------------------

def pullback_cluster(f, k, seed=0):
    """f*(K): base points of (w o f, z o f) for certified curves w, z
    through K.  Requires a finite germ (empty contracted curve)."""
    contracted, _ = fixed_part(f)
    if contracted is not None:
        raise ContractedCurvePresent(
            "pullback is only defined for finite map germs")
    if not k.forest.nodes:
        return WeightedMultiCluster([], {})
    w, z = curves_through(k, seed)
    wf = w.poly.compose(f.f1.poly, f.f2.poly)
    zf = z.poly.compose(f.f1.poly, f.f2.poly)
    return base_points(LocalMap.from_polys(wf, zf))
