"""Enriques forests of infinitely near points and weighted multi-clusters.

A forest node records its immediate predecessor (parent) and, when the
point is satellite, the strict ancestor it is additionally proximate to
(second_proximity).  Galois-conjugate points are stored once with an
orbit size.  Weighted clusters attach an integer multiplicity to every
node; consistency means all proximity excesses are non-negative.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyCluster, ForestViolation, InconsistentCluster


@dataclass(frozen=True)
class Node:
    id: str
    parent: str | None = None
    second_proximity: str | None = None
    orbit: int = 1


class EnriquesForest:
    """An immutable forest of infinitely near points, ancestor-first."""

    def __init__(self, nodes):
        nodes = tuple(nodes)
        violations = validate_node_list(nodes)
        if violations:
            raise ForestViolation("; ".join(violations))
        self.nodes = _canonical_order(nodes)
        self.by_id = {n.id: n for n in self.nodes}
        self.children = {n.id: [] for n in self.nodes}
        self._satellites = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None:
                self.children[n.parent].append(n.id)
            if n.second_proximity is not None:
                self._satellites[n.second_proximity].append(n.id)

    def __eq__(self, other):
        return isinstance(other, EnriquesForest) and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.nodes)

    def ancestors(self, nid):
        out = []
        n = self.by_id[nid]
        while n.parent is not None:
            out.append(n.parent)
            n = self.by_id[n.parent]
        return out

    def proximate_to(self, nid):
        """Nodes proximate to the given node: its children plus satellites."""
        return list(self.children[nid]) + self._satellites[nid]

    def roots(self):
        return [n.id for n in self.nodes if n.parent is None]


def _canonical_order(nodes):
    by_id = {n.id: n for n in nodes}
    depths = {n.id: 0 for n in nodes if n.parent is None}
    for n in nodes:
        path = []
        cur = n.id
        while cur not in depths:
            path.append(cur)
            cur = by_id[cur].parent
        d = depths[cur]
        for cid in reversed(path):
            d += 1
            depths[cid] = d
    return tuple(sorted(nodes, key=lambda n: (depths[n.id], n.id)))


def validate_node_list(nodes):
    """All EnriquesForest invariant violations for a raw node list."""
    out = []
    seen = {}
    for n in nodes:
        if n.id in seen:
            out.append(f"DuplicateId: {n.id}")
        seen[n.id] = n
    for n in nodes:
        if n.orbit < 1:
            out.append(f"BadOrbit: {n.id}")
        if n.parent is not None and n.parent not in seen:
            out.append(f"MissingParent: {n.id}")
        if n.parent == n.id:
            out.append(f"SelfParent: {n.id}")
    # acyclicity of parent edges (memoized so long chains stay linear)
    acyclic = set()
    for n in nodes:
        path = []
        on_path = set()
        cur = n.id
        while cur is not None and cur not in acyclic:
            if cur in on_path:
                out.append(f"ParentCycle: {n.id}")
                return out
            path.append(cur)
            on_path.add(cur)
            nxt = seen[cur].parent if cur in seen else None
            cur = nxt if nxt in seen else None
        acyclic.update(path)
    for n in nodes:
        if n.second_proximity is None:
            continue
        if n.parent is None:
            out.append(f"SatelliteRoot: {n.id}")
            continue
        if n.second_proximity == n.parent:
            out.append(f"DuplicateProximity: {n.id}")
            continue
        # must be a strict ancestor of the parent
        anc = []
        cur = seen[n.parent].parent if n.parent in seen else None
        while cur is not None:
            anc.append(cur)
            cur = seen[cur].parent if cur in seen else None
        if n.second_proximity not in anc:
            out.append(f"IllegalSatellite: {n.id}")
    for n in nodes:
        if n.parent is not None and n.parent in seen:
            if n.orbit % seen[n.parent].orbit != 0:
                out.append(f"OrbitNotMultipleOfParent: {n.id}")
    return out


def validate_forest(nodes):
    """Diagnostic entry point: list of violation strings (empty iff valid)."""
    if isinstance(nodes, EnriquesForest):
        return []
    return validate_node_list(tuple(nodes))


class WeightedMultiCluster:
    """A forest with an integer weight per node."""

    def __init__(self, forest, weights, _allow_negative=False):
        if not isinstance(forest, EnriquesForest):
            forest = EnriquesForest(forest)
        self.forest = forest
        self.weights = dict(weights)
        for n in forest.nodes:
            if n.id not in self.weights:
                raise ForestViolation(f"missing weight for {n.id}")
            if not _allow_negative and self.weights[n.id] < 0:
                raise ForestViolation(f"negative weight at {n.id}")
        extra = set(self.weights) - set(forest.by_id)
        if extra:
            raise ForestViolation(f"weights for unknown nodes {sorted(extra)}")

    def __eq__(self, other):
        return (isinstance(other, WeightedMultiCluster)
                and self.forest == other.forest
                and self.weights == other.weights)

    def __repr__(self):
        bits = ", ".join(f"{n.id}:{self.weights[n.id]}"
                         + (f"x{n.orbit}" if n.orbit > 1 else "")
                         for n in self.forest.nodes)
        return f"WeightedMultiCluster({bits})"

    # -- counts ---------------------------------------------------------
    def size(self):
        """|K|: number of points counted with orbit size (weight-0 included)."""
        return sum(n.orbit for n in self.forest.nodes)

    def scale(self, m):
        return WeightedMultiCluster(
            self.forest, {k: m * v for k, v in self.weights.items()},
            _allow_negative=True)

    def restrict(self, ids):
        nodes = [n for n in self.forest.nodes if n.id in ids]
        return WeightedMultiCluster(
            EnriquesForest(nodes), {i: self.weights[i] for i in ids})


def excesses(k):
    """Proximity excess per node, orbit-relative.

    A proximate point q' in an orbit of size o' contributes its weight
    once per conjugate lying over each conjugate of q, i.e. with factor
    o'/o_q; for legal forests this is a positive integer.
    """
    f = k.forest
    out = {}
    for n in f.nodes:
        rho = Fraction(k.weights[n.id])
        for cid in f.proximate_to(n.id):
            c = f.by_id[cid]
            rho -= Fraction(c.orbit, n.orbit) * k.weights[cid]
        if rho.denominator != 1:
            raise ForestViolation(f"non-integral excess at {n.id}")
        out[n.id] = int(rho)
    return out


def is_consistent(k):
    return all(v >= 0 for v in excesses(k).values())


def self_intersection(k):
    return sum(n.orbit * k.weights[n.id] ** 2 for n in k.forest.nodes)


def virtual_codimension(k):
    total = Fraction(0)
    for n in k.forest.nodes:
        v = k.weights[n.id]
        total += Fraction(n.orbit * v * (v + 1), 2)
    return total


def hilbert_samuel_check(k, k_max):
    """Codimension of m-fold multiples grows as K^2 m^2 / 2 + linear."""
    if not is_consistent(k):
        raise InconsistentCluster("cluster violates proximity inequalities")
    k2 = self_intersection(k)
    vals = [virtual_codimension(k.scale(m)) - Fraction(k2 * m * m, 2)
            for m in range(1, k_max + 1)]
    for i in range(len(vals) - 2):
        if vals[i + 2] - 2 * vals[i + 1] + vals[i] != 0:
            return False
    return True


def noether_intersection(a, b):
    """Sum of orbit * nu * mu over shared nodes (missing weights are 0)."""
    total = 0
    for n in a.forest.nodes:
        if n.id in b.weights:
            total += n.orbit * a.weights[n.id] * b.weights[n.id]
    return total


def harbourne_constant(c_self_int, mults):
    n = mults.size()
    if n < 1:
        raise EmptyCluster("Harbourne constant needs at least one point")
    return Fraction(c_self_int - self_intersection(mults), n)


def h_passing_bound(c_self_int, k):
    if not is_consistent(k):
        raise InconsistentCluster("cluster violates proximity inequalities")
    n = k.size()
    if n < 1:
        raise EmptyCluster("bound needs at least one point")
    return Fraction(c_self_int - self_intersection(k), n)


def remark_h4_monotone(c_self_int, k, full):
    """Single-step monotonicity of H along extensions from k to full.

    Walks every predecessor-closed subset between k's support and full's,
    and checks that whenever H >= -4 at a subset, adding one more point
    of full (weight >= 2 required outside k) does not increase H.
    """
    base = frozenset(k.forest.by_id)
    target = set(full.forest.by_id)
    if not base <= target:
        raise ForestViolation("k is not a sub-forest of full")
    for nid in target - base:
        if full.weights[nid] < 2:
            raise ForestViolation(f"extension weight < 2 at {nid}")
    for nid in base:
        if full.weights[nid] != k.weights[nid]:
            raise ForestViolation(f"weight mismatch at {nid}")

    def h_of(subset):
        return harbourne_constant(c_self_int, full.restrict(subset))

    seen = set()
    stack = [base]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        h_cur = h_of(cur)
        for nid in target - cur:
            parent = full.forest.by_id[nid].parent
            if parent is not None and parent not in cur:
                continue
            nxt = cur | {nid}
            if h_cur >= -4 and h_of(nxt) > h_cur:
                return False
            stack.append(nxt)
    return True


# ---------------------------------------------------------------------------
# Proximity matrix
# ---------------------------------------------------------------------------

def proximity_matrix(forest):
    """(node order, P) with P[q][q] = 1 and P[q][p] = -1 for q proximate to p."""
    order = [n.id for n in forest.nodes]
    idx = {nid: i for i, nid in enumerate(order)}
    n = len(order)
    mat = [[0] * n for _ in range(n)]
    for i, nid in enumerate(order):
        mat[i][i] = 1
        node = forest.by_id[nid]
        if node.parent is not None:
            mat[i][idx[node.parent]] = -1
        if node.second_proximity is not None:
            mat[i][idx[node.second_proximity]] = -1
    return order, mat


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def single_point(weight, orbit=1, nid="p"):
    return WeightedMultiCluster([Node(nid, orbit=orbit)], {nid: weight})


def chain_cluster(weights, satellites=None, prefix="q", orbit=1):
    """A totally ordered cluster q1 <- q2 <- ... with optional satellites.

    ``satellites`` maps node index (0-based) to the index of the strict
    ancestor (of its parent) it is additionally proximate to.
    """
    satellites = satellites or {}
    nodes = []
    for i, _ in enumerate(weights):
        nid = f"{prefix}{i + 1}"
        parent = f"{prefix}{i}" if i > 0 else None
        sp = f"{prefix}{satellites[i] + 1}" if i in satellites else None
        nodes.append(Node(nid, parent, sp, orbit))
    return WeightedMultiCluster(
        nodes, {f"{prefix}{i + 1}": w for i, w in enumerate(weights)})


def disjoint_union(*clusters):
    """Multi-cluster union of clusters with disjoint node ids."""
    nodes, weights = [], {}
    for i, c in enumerate(clusters):
        for n in c.forest.nodes:
            nid = f"c{i}_{n.id}"
            nodes.append(Node(nid,
                              f"c{i}_{n.parent}" if n.parent else None,
                              f"c{i}_{n.second_proximity}" if n.second_proximity else None,
                              n.orbit))
            weights[nid] = c.weights[n.id]
    return WeightedMultiCluster(nodes, weights)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def cluster_to_json(k):
    return {"nodes": [{"id": n.id, "parent": n.parent,
                       "second_proximity": n.second_proximity,
                       "orbit": n.orbit, "mult": k.weights[n.id]}
                      for n in k.forest.nodes]}


def cluster_from_json(data):
    nodes = []
    weights = {}
    for nd in data["nodes"]:
        nodes.append(Node(nd["id"], nd.get("parent"),
                          nd.get("second_proximity"), nd.get("orbit", 1)))
        weights[nd["id"]] = nd["mult"]
    return WeightedMultiCluster(nodes, weights)
