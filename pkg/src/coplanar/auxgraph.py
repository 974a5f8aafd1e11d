"""Support hypergraphs, tight Hamiltonian cycles, and the bipartite
substitution graphs built from them.

The (2sd+1)-uniform support graph lives on the points of a heavy s-flat;
a tight Hamiltonian cycle through it is chopped into windows, and each
window becomes the neighborhood of a block of outer points.  The resulting
bipartite graph has constant left degree and neighborhoods that no 2d
distinct (s-1)-flats can cover.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .enumeration import FlatCache
from .errors import (
    BudgetExceededError,
    HeavinessViolatedError,
    InvariantViolationError,
    NoCycleFoundError,
    SizeMismatchError,
    TooFewPointsError,
)
from .geometry import affinely_independent, span_points

DEFAULT_CYCLE_BUDGET = 2_000_000
DEFAULT_EDGE_BUDGET = 2_000_000


@dataclass(frozen=True)
class KGraph:
    """A k-uniform hypergraph on an ordered point list (index-based edges)."""

    k: int
    vertices: tuple
    edges: frozenset  # of sorted index tuples

    def degree(self, v):
        return sum(1 for e in self.edges if v in e)

    def min_degree(self):
        return min((self.degree(v) for v in range(len(self.vertices))), default=0)

    def is_complete(self):
        import math
        return len(self.edges) == math.comb(len(self.vertices), self.k)


@dataclass(frozen=True)
class BipartiteIncidence:
    """Bipartite graph between an outer part A and an inner part B.

    adj_a[i] lists the B-indices adjacent to A-vertex i.
    """

    part_a: tuple
    part_b: tuple
    adj_a: tuple
    s: int = None
    meta: dict = dc_field(default_factory=dict, compare=False)

    def neighbors_a(self, i):
        return self.adj_a[i]

    def degree_b(self):
        degs = [0] * len(self.part_b)
        for nbrs in self.adj_a:
            for b in nbrs:
                degs[b] += 1
        return degs

    def edges(self):
        return [(a, b) for a, nbrs in enumerate(self.adj_a) for b in nbrs]


def _subset_admits_ordering(field, d, pts, s):
    """Ordering search for the support-graph edge condition: the first s
    points independent, every later point off every flat of s earlier ones."""
    k = len(pts)
    idx = list(range(k))

    def flats_of(chosen):
        out = []
        for comb in itertools.combinations(chosen, s):
            out.append(span_points(field, d, [pts[i] for i in comb]))
        return out

    def rec(order, remaining):
        if not remaining:
            return True
        pos = len(order)
        if pos < s:
            for i, v in enumerate(remaining):
                cand = order + [v]
                if affinely_independent(field, [pts[t] for t in cand]):
                    if rec(cand, remaining[:i] + remaining[i + 1:]):
                        return True
            return False
        forbidden = flats_of(order)
        for i, v in enumerate(remaining):
            if any(f.contains(pts[v]) for f in forbidden):
                continue
            if rec(order + [v], remaining[:i] + remaining[i + 1:]):
                return True
        return False

    return rec([], idx)


def build_support_kgraph(p, s, d, budget=DEFAULT_EDGE_BUDGET):
    """The (2sd+1)-uniform support graph on the point set P = X cap F'.

    A subset is an edge iff some insertion order keeps every new point off
    all flats spanned by s earlier points (for s = 1 this is just
    distinctness, so the graph is complete).
    """
    k = 2 * s * d + 1
    pts = tuple(p.points)
    if len(pts) < k:
        raise TooFewPointsError(
            f"support graph needs at least k={k} points, got {len(pts)}")
    import math
    total = math.comb(len(pts), k)
    if s == 1:
        # distinct points always admit an ordering
        edges = frozenset(itertools.combinations(range(len(pts)), k))
        return KGraph(k=k, vertices=pts, edges=edges)
    if total > budget:
        raise BudgetExceededError(
            f"support graph would enumerate {total} subsets (budget {budget})")
    field, d_amb = p.field, p.d
    edges = set()
    for comb in itertools.combinations(range(len(pts)), k):
        if _subset_admits_ordering(field, d_amb, [pts[i] for i in comb], s):
            edges.add(comb)
    return KGraph(k=k, vertices=pts, edges=edges)


def tight_hamiltonian_cycle(g, budget=DEFAULT_CYCLE_BUDGET):
    """A cyclic vertex order in which every k consecutive vertices form an
    edge, by backtracking with a most-constrained-next-vertex heuristic.

    Raises NoCycleFound when the search space is exhausted, BudgetExceeded
    when the node budget runs out first.
    """
    n = len(g.vertices)
    k = g.k
    if n < k + 1:
        raise TooFewPointsError(f"tight cycle needs |V| >= k+1 = {k + 1}")
    if g.is_complete():
        return list(range(n))
    if k == 1:
        return list(range(n)) if len(g.edges) == n else _no_cycle(g)
    edges = g.edges
    nodes = [0]

    def ok_window(order, closing=False):
        # check the newest full window, and the wrap windows when closing
        if len(order) >= k:
            if tuple(sorted(order[-k:])) not in edges:
                return False
        if closing:
            for t in range(1, k):
                window = order[-(k - t):] + order[:t]
                if len(window) == k and tuple(sorted(window)) not in edges:
                    return False
        return True

    used = [False] * n
    order = [0]
    used[0] = True

    def degree_in(v):
        return sum(1 for e in edges if v in e)

    by_constraint = sorted(range(n), key=lambda v: (degree_in(v), v))

    def rec(order):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceededError(
                f"tight-cycle search exceeded {budget} nodes")
        if len(order) == n:
            return ok_window(order, closing=True)
        for v in by_constraint:
            if used[v]:
                continue
            order.append(v)
            used[v] = True
            if ok_window(order) and rec(order):
                return True
            used[v] = False
            order.pop()
        return False

    if rec(order):
        return order
    raise NoCycleFoundError(
        f"no tight Hamiltonian cycle found on {n} vertices (k={k})")


def _no_cycle(g):
    raise NoCycleFoundError("graph has an uncovered vertex")


def validate_tight_cycle(g, order):
    """Every cyclic k-window of the order must be an edge; each vertex once."""
    n = len(g.vertices)
    if sorted(order) != list(range(n)):
        return False
    for i in range(n):
        window = tuple(sorted(order[(i + t) % n] for t in range(g.k)))
        if window not in g.edges:
            return False
    return True


def _min_flat_cover_exceeds(field, d, pts, s, limit):
    """True iff the points cannot be covered by `limit` distinct (s-1)-flats.

    Covering flats may be assumed to be spans of point subsets with
    dimension <= s-1; exact branch-and-bound on the first uncovered point.
    """
    if s == 1:
        return len(set(pts)) > limit  # 0-flats are single points

    def rec(uncovered, used):
        if not uncovered:
            return False  # covered within the limit
        if used == limit:
            return True
        first = uncovered[0]
        rest = uncovered[1:]
        # candidate groups: maximal subsets containing `first` of span dim <= s-1
        seen = set()
        for size in range(min(len(rest), s - 1), -1, -1):
            for comb in itertools.combinations(rest, size):
                group = (first,) + comb
                flat = span_points(field, d, [pts[i] for i in group])
                if flat.dim > s - 1:
                    continue
                covered = frozenset(i for i in uncovered if flat.contains(pts[i]))
                if covered in seen:
                    continue
                seen.add(covered)
                if not rec([i for i in uncovered if i not in covered], used + 1):
                    return False
        return True

    return rec(list(range(len(pts))), 0)


def build_hf(f, fprime, x, s, eps, cache=None,
             cycle_budget=DEFAULT_CYCLE_BUDGET, validate=True):
    """The bipartite graph H_F over A = X cap F, B = X cap F'.

    F' must witness (s,eps,X)-heaviness of F.  The construction follows the
    tight Hamiltonian cycle of the support graph on B: block i of the
    equitable partition of A attaches to cycle window i.
    """
    if cache is None:
        cache = FlatCache(x)
    if not f.contains_flat(fprime):
        raise HeavinessViolatedError("F' is not a subflat of F")
    if fprime.dim != s:
        raise HeavinessViolatedError(f"witness flat has dim {fprime.dim}, expected s={s}")
    a_idx = cache.indices(f)
    b_idx = cache.indices(fprime)
    count_a, count_b = len(a_idx), len(b_idx)
    if Fraction(count_b) < eps ** (f.dim - s) * count_a:
        raise HeavinessViolatedError(
            f"|X cap F'|={count_b} < eps^(dimF-s)|X cap F|="
            f"{eps ** (f.dim - s) * count_a}")
    d = x.d
    part_b = tuple(x.points[i] for i in b_idx)
    bset = x.subset(b_idx)
    g = build_support_kgraph(bset, s, d)
    hc = tight_hamiltonian_cycle(g, budget=cycle_budget)
    m = len(hc)
    k = g.k
    windows = [tuple(hc[(i + t) % m] for t in range(k)) for i in range(m)]
    part_a = tuple(x.points[i] for i in a_idx)
    # round-robin equitable partition of A in canonical order
    adj_a = tuple(tuple(sorted(windows[i % m])) for i in range(count_a))
    hf = BipartiteIncidence(
        part_a=part_a, part_b=part_b, adj_a=adj_a, s=s,
        meta={"k": k, "cycle": hc,
              "ratio_bound": Fraction(6 * d * d * count_a, count_b),
              "deg_a_bound": 3 * d * d, "flat": f, "witness": fprime})
    if validate:
        validate_hf(hf, x.field, d, s)
    return hf


def validate_hf(hf, field, d, s, cover_flat_limit=10_000, seed=0):
    """Check the three structural guarantees of the substitution graph:
    left degree 2sd+1 <= 3d^2, right degree <= 6d^2 |A|/|B|, and no left
    neighborhood coverable by 2d distinct (s-1)-flats."""
    k = 2 * s * d + 1
    for i, nbrs in enumerate(hf.adj_a):
        if len(nbrs) != k:
            raise InvariantViolationError(
                f"A-vertex {i} has degree {len(nbrs)}, expected {k}")
    if k > 3 * d * d:
        raise InvariantViolationError(f"2sd+1={k} > 3d^2={3 * d * d}")
    bound = Fraction(6 * d * d * len(hf.part_a), len(hf.part_b))
    for b, deg in enumerate(hf.degree_b()):
        if Fraction(deg) > bound:
            raise InvariantViolationError(
                f"B-vertex {b} has degree {deg} > bound {bound}")
    inner_flats = _count_subflats(field, s - 1, hf.meta.get("witness"))
    exhaustive = inner_flats is None or inner_flats <= cover_flat_limit
    check_indices = range(len(hf.adj_a)) if exhaustive else \
        _sample_indices(len(hf.adj_a), 32, seed)
    seen = set()
    for i in check_indices:
        nbrs = hf.adj_a[i]
        if nbrs in seen:
            continue
        seen.add(nbrs)
        pts = [hf.part_b[b] for b in nbrs]
        if not _min_flat_cover_exceeds(field, len(pts[0]), pts, s, 2 * d):
            raise InvariantViolationError(
                f"neighborhood of A-vertex {i} is coverable by {2 * d} "
                f"({s - 1})-flats")
    return True


def _count_subflats(field, dim, flat):
    """Number of dim-flats inside the witness flat (None when unknown)."""
    if flat is None or dim < 0:
        return 0
    q = field.q
    k = flat.dim
    if dim > k:
        return 0
    # q^(k-dim) * gaussian binomial [k choose dim]_q
    num = 1
    den = 1
    for t in range(dim):
        num *= q ** (k - t) - 1
        den *= q ** (t + 1) - 1
    return q ** (k - dim) * (num // den)


def _sample_indices(n, count, seed):
    from . import rand
    return sorted(set(int(v) for v in rand.uniform_below(seed, n, min(count, n), 90)))


def alternating_ham_path(a_side, b_side, v):
    """The explicit alternating directed Hamiltonian path b1 a1 b2 a2 ...
    starting at v in B, with A and B minus {v} taken in the order given."""
    if not (len(a_side) <= len(b_side) <= len(a_side) + 1):
        raise SizeMismatchError(
            f"need |A| <= |B| <= |A|+1, got |A|={len(a_side)}, |B|={len(b_side)}")
    if v not in b_side:
        raise SizeMismatchError("start vertex must belong to B")
    b_order = [v] + [b for b in b_side if b != v]
    path = []
    for i, a in enumerate(a_side):
        path.append(b_order[i])
        path.append(a)
    if len(b_order) > len(a_side):
        path.append(b_order[-1])
    return path
