"""Shared subset-enumeration machinery: cached spans and point masks,
pruned DFS over independent/coplanar subsets, and combinadic ranking.

The classifier and the constructions both enumerate many small subsets of
one ground set; this module keeps the per-flat work (span, membership mask,
point count) computed once.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import BudgetExceededError
from .geometry import make_flat, span_points


class FlatCache:
    """Memoized spans, membership bitmasks, and point counts for one X."""

    def __init__(self, x):
        self.X = x
        self.field = x.field
        self.d = x.d
        self.n = x.n
        self._span = {}
        self._mask = {}
        self.memo = {}  # scratch space for higher layers (balance dims etc.)

    def span_idx(self, idx):
        """Span of the points of X at the given sorted index tuple."""
        flat = self._span.get(idx)
        if flat is None:
            pts = [self.X.points[i] for i in idx]
            flat = span_points(self.field, self.d, pts)
            self._span[idx] = flat
        return flat

    def extend(self, flat, idx):
        """Span of flat together with one more point of X."""
        pt = self.X.points[idx]
        return make_flat(self.field, self.d, flat.base,
                         flat.basis + (self.field.sub_vec(pt, flat.base),))

    def mask(self, flat):
        """Bitmask of X-indices lying in the flat."""
        m = self._mask.get(flat)
        if m is None:
            m = 0
            if flat.size() <= 2 * self.n:
                index = self.X._index
                for pt in flat.enumerate_points():
                    i = index.get(pt)
                    if i is not None:
                        m |= 1 << i
            else:
                for i, pt in enumerate(self.X.points):
                    if flat.contains(pt):
                        m |= 1 << i
            self._mask[flat] = m
        return m

    def count(self, flat):
        return self.mask(flat).bit_count()

    def indices(self, flat):
        return _bits(self.mask(flat))


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def igp_subsets(x, cache, size, start_indices=None):
    """Yield (sorted index tuple, span flat) for every subset of X of the
    given size in general position, in lexicographic index order.

    Dependent prefixes are pruned: a point inside the span of the chosen
    prefix can never take part in an independent subset extending it.
    """
    n = x.n
    indices = range(n) if start_indices is None else start_indices

    def rec(prefix, flat):
        m = len(prefix)
        if m == size:
            yield tuple(prefix), flat
            return
        fmask = cache.mask(flat) if flat is not None else 0
        for nxt in range(prefix[-1] + 1, n - (size - m) + 1):
            if (fmask >> nxt) & 1:
                continue
            nf = cache.span_idx((prefix[0], nxt)) if m == 1 else (
                cache.extend(flat, nxt) if flat is not None else None)
            yield from rec(prefix + [nxt], nf)

    if size == 1:
        for a in indices:
            yield (a,), cache.span_idx((a,))
        return
    for a in indices:
        if a <= n - size:
            yield from rec([a], None)


def coplanar_dsets(x, cache, mode="list", budget=None):
    """All coplanar (d+1)-subsets of X, each exactly once.

    mode "list" returns sorted index tuples; mode "count" returns the exact
    count without materializing members.  Enumeration walks affinely
    independent prefixes and, on meeting the first dependent point, emits
    every completion wholesale (any superset of a dependent set is
    coplanar).
    """
    d = x.d
    n = x.n
    target = d + 1
    out = [] if mode == "list" else None
    state = {"count": 0, "nodes": 0}

    def spend(amount=1):
        state["nodes"] += amount
        if budget is not None and state["nodes"] > budget:
            raise BudgetExceededError(
                f"coplanar enumeration exceeded the budget of {budget} nodes")

    def emit_completions(prefix, more):
        last = prefix[-1]
        if mode == "count":
            state["count"] += math.comb(n - last - 1, more)
            spend()
            return
        if more == 0:
            out.append(tuple(prefix))
            spend()
            return
        for comb in itertools.combinations(range(last + 1, n), more):
            out.append(tuple(prefix) + comb)
            spend()

    def rec(prefix, flat):
        m = len(prefix)
        fmask = cache.mask(flat) if flat is not None else 0
        for nxt in range(prefix[-1] + 1, n):
            spend()
            if (fmask >> nxt) & 1:
                emit_completions(prefix + [nxt], target - m - 1)
                continue
            if m + 1 >= target:
                continue  # independent (d+1)-set: not coplanar
            nf = cache.span_idx((prefix[0], nxt)) if m == 1 else cache.extend(flat, nxt)
            rec(prefix + [nxt], nf)

    for a in range(n - target + 1):
        rec([a], None)
    return state["count"] if mode == "count" else out


# -- combinadic ranks ----------------------------------------------------------

def comb_table(n, k):
    """uint64 table t[x, r] = C(x, r) for 0 <= x <= n, 0 <= r <= k."""
    t = np.zeros((n + 1, k + 1), dtype=np.uint64)
    for x in range(n + 1):
        for r in range(min(x, k) + 1):
            t[x, r] = math.comb(x, r)
    return t


def rank_of_subset(members, n, k):
    """Lexicographic rank of one sorted k-subset of range(n)."""
    r = 0
    prev = -1
    for t, v in enumerate(members):
        r += math.comb(n - prev - 1, k - t) - math.comb(n - v, k - t)
        prev = v
    return r


def ranks_of_subsets(members, n, k, table=None):
    """Vectorized lexicographic ranks; members is an (M, k) int array."""
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        return np.zeros(0, dtype=np.int64)
    if table is None:
        table = comb_table(n, k)
    m = members.shape[0]
    prev = np.empty_like(members)
    prev[:, 0] = -1
    prev[:, 1:] = members[:, :-1]
    ranks = np.zeros(m, dtype=np.uint64)
    for t in range(k):
        ranks += table[n - prev[:, t] - 1, k - t] - table[n - members[:, t], k - t]
    return ranks.astype(np.int64)


def unrank_subset(rank, n, k):
    """Inverse of rank_of_subset."""
    out = []
    prev = -1
    for t in range(k):
        v = prev + 1
        while True:
            block = math.comb(n - v - 1, k - t - 1)
            if rank < block:
                break
            rank -= block
            v += 1
        out.append(v)
        prev = v
    return tuple(out)
