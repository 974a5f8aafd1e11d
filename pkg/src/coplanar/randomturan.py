"""Random Turán experiments: p-random subsets, maximum general-position
extraction (exact branch-and-bound or greedy), moment-curve baselines, and
tiny-scale counts of general-position k-sets.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import rand
from .enumeration import FlatCache
from .errors import BudgetExceededError, InputError
from .field import enumerate_space, make_field
from .geometry import PointSet

DEFAULT_EXACT_LIMIT = 26
DEFAULT_NODE_BUDGET = 3_000_000
DEFAULT_SPACE_BUDGET = 1 << 20


@dataclass(frozen=True)
class SweepConfig:
    q: int
    d: int
    p_grid: tuple  # Fractions, sorted ascending
    trials: int
    seed: int
    mode: str = "auto"  # exact | greedy | both | auto
    exact_limit: int = DEFAULT_EXACT_LIMIT
    node_budget: int = DEFAULT_NODE_BUDGET
    threads: int = 1
    timing: bool = False

    def __post_init__(self):
        if list(self.p_grid) != sorted(self.p_grid):
            raise InputError("p grid must be sorted ascending")
        for p in self.p_grid:
            if not 0 <= p <= 1:
                raise InputError(f"p={p} outside [0, 1]")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.mode not in ("exact", "greedy", "both", "auto"):
            raise InputError(f"unknown solver mode {self.mode!r}")


@dataclass(frozen=True)
class SweepRow:
    p: Fraction
    trial: int
    sample_size: int
    alpha: int
    mode: str
    millis: int


@dataclass(frozen=True)
class SolveResult:
    alpha: int
    witness: tuple  # X-indices
    mode: str
    nodes: int
    exact: bool


def p_random_subset(q, d, p, seed, budget=DEFAULT_SPACE_BUDGET):
    """Each point of GF(q)^d kept independently with exact probability p."""
    f = make_field(q)
    space = enumerate_space(f, d, budget=budget)
    p = Fraction(p)
    if p == 0:
        return PointSet(f, d, ())
    if p == 1:
        return PointSet(f, d, tuple(space))
    keep = rand.bernoulli_exact(seed, np.arange(len(space)),
                                p.numerator, p.denominator, rand.TAG_PRANDOM)
    return PointSet(f, d, tuple(pt for pt, k in zip(space, keep) if k))


def moment_curve(q, d):
    """The q points (x, x^2, ..., x^d); in general position whenever the
    relevant Vandermonde minors are nonzero (verified by tests, not assumed)."""
    f = make_field(q)
    pts = []
    for x in range(q):
        coords = []
        acc = 1
        for _ in range(d):
            acc = f.mul(acc, x)
            coords.append(acc)
        pts.append(tuple(coords))
    return PointSet(f, d, tuple(pts))


# -- maximum general-position extraction ----------------------------------------

def _blocking_masks(cache, chosen, v, d):
    """Masks of spans of T cup {v} over subsets T of chosen with
    |T| = min(|chosen|, d-1); points inside any of them cannot extend."""
    import itertools

    size = min(len(chosen), d - 1)
    blocked = 0
    if size == 0:
        return 1 << v  # only v itself
    for comb in itertools.combinations(chosen, size):
        idx = tuple(sorted(comb + (v,)))
        blocked |= cache.mask(cache.span_idx(idx))
    return blocked


def _greedy(x, cache):
    n, d = x.n, x.d
    chosen = []
    cand = (1 << n) - 1
    v = 0
    while True:
        rest = cand >> v
        if rest == 0:
            break
        v += (rest & -rest).bit_length() - 1
        cand &= ~_blocking_masks(cache, chosen, v, d)
        chosen.append(v)
        v += 1
        if v >= n:
            break
    return chosen


def max_general_position(x, mode="auto", node_budget=DEFAULT_NODE_BUDGET,
                         exact_limit=DEFAULT_EXACT_LIMIT, cache=None):
    """Largest subset of X in general position.

    exact mode runs branch-and-bound over canonical point order with
    span-blocking and a best-plus-remaining cut; greedy mode is the
    canonical-order greedy (a lower bound).  auto picks exact for small
    inputs and greedy above exact_limit, recording which ran.
    """
    if cache is None:
        cache = FlatCache(x)
    n, d = x.n, x.d
    if n == 0:
        return SolveResult(alpha=0, witness=(), mode="exact", nodes=0, exact=True)
    if mode == "greedy" or (mode == "auto" and n > exact_limit):
        chosen = _greedy(x, cache)
        return SolveResult(alpha=len(chosen), witness=tuple(chosen),
                           mode="greedy", nodes=n, exact=False)

    best = {"alpha": 0, "set": ()}
    nodes = {"count": 0}

    def rec(chosen, cand):
        nodes["count"] += 1
        if nodes["count"] > node_budget:
            raise BudgetExceededError(
                f"exact search exceeded {node_budget} nodes")
        if len(chosen) > best["alpha"]:
            best["alpha"] = len(chosen)
            best["set"] = tuple(chosen)
        rest = cand
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            if len(chosen) + 1 + rest.bit_count() <= best["alpha"]:
                break  # candidates are ascending; the cut only tightens
            nxt = (cand & ~((1 << (v + 1)) - 1)) & ~_blocking_masks(
                cache, chosen, v, d)
            chosen.append(v)
            rec(chosen, nxt)
            chosen.pop()

    try:
        rec([], (1 << n) - 1)
    except BudgetExceededError:
        if mode == "auto":
            chosen = _greedy(x, cache)
            return SolveResult(alpha=len(chosen), witness=tuple(chosen),
                               mode="greedy", nodes=nodes["count"], exact=False)
        raise
    return SolveResult(alpha=best["alpha"], witness=best["set"], mode="exact",
                       nodes=nodes["count"], exact=True)


# -- the sweep -------------------------------------------------------------------

def regime_boundaries(q, d):
    """The two density exponents where the qualitative behavior changes:
    q^(-d+1/d) and q^(-1+1/d)."""
    return (q ** (-d + 1 / d), q ** (-1 + 1 / d))


def auto_grid(q, d, count=20, denom=10 ** 6):
    """Log-spaced p grid over [q^-d, 1] plus 0, 1, and the two regime
    boundaries, as exact rationals."""
    lo, hi = regime_boundaries(q, d)
    specials = [Fraction(0), Fraction(1)]
    for v in (lo, hi):
        specials.append(Fraction(round(v * denom), denom))
    fill = max(count - len(specials), 0)
    lo_exp, hi_exp = math.log10(q ** -d), 0.0
    grid = set(specials)
    for t in range(fill):
        v = 10 ** (lo_exp + (hi_exp - lo_exp) * (t + 1) / (fill + 1))
        grid.add(Fraction(max(1, round(v * denom)), denom))
    return tuple(sorted(grid))


def _one_trial(config, p_idx, trial):
    import time

    p = config.p_grid[p_idx]
    sub_seed = int(rand.derive_key(config.seed, p_idx, trial)[0] >> 1)
    start = time.perf_counter()
    sample = p_random_subset(config.q, config.d, p, sub_seed)
    rows = []
    modes = ("exact", "greedy") if config.mode == "both" else (config.mode,)
    for mode in modes:
        res = max_general_position(sample, mode=mode,
                                   node_budget=config.node_budget,
                                   exact_limit=config.exact_limit)
        millis = int((time.perf_counter() - start) * 1000) if config.timing else 0
        rows.append(SweepRow(p=p, trial=trial, sample_size=sample.n,
                             alpha=res.alpha, mode=res.mode, millis=millis))
    return rows


def alpha_sweep(config):
    """Run every (p, trial) cell; returns (rows, summary).

    Deterministic: per-trial randomness derives from (seed, p index, trial)
    and rows are emitted in canonical order whatever the thread count.
    """
    cells = [(pi, t) for pi in range(len(config.p_grid))
             for t in range(config.trials)]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = dict(zip(cells, pool.map(
                lambda c: _one_trial(config, *c), cells)))
    else:
        results = {c: _one_trial(config, *c) for c in cells}
    rows = [row for c in cells for row in results[c]]
    return rows, summarize_sweep(config, rows)


def summarize_sweep(config, rows):
    """Per-p medians and the qualitative regime statistics."""
    medians = {}
    for pi, p in enumerate(config.p_grid):
        vals = [r.alpha for r in rows if r.p == p]
        if vals:
            medians[p] = statistics.median(vals)
    med_list = [medians[p] for p in config.p_grid if p in medians]
    violations = sum(1 for a, b in zip(med_list, med_list[1:]) if b < a - 1)
    lo, hi = regime_boundaries(config.q, config.d)
    p_lo = min(config.p_grid, key=lambda p: abs(float(p) - lo))
    p_hi = min(config.p_grid, key=lambda p: abs(float(p) - hi))
    m_lo, m_hi = medians.get(p_lo), medians.get(p_hi)
    plateau = None
    if m_lo and m_hi:
        plateau = max(m_lo, m_hi) / min(m_lo, m_hi)
    return {
        "medians": {str(p): m for p, m in medians.items()},
        "monotonicity_violations_slack1": violations,
        "regime_boundaries": {"low": lo, "high": hi,
                              "grid_low": str(p_lo), "grid_high": str(p_hi)},
        "plateau_ratio": plateau,
    }


CSV_HEADER = "q,d,p_num,p_den,trial,sample_size,alpha,mode,millis"


def rows_to_csv(config, rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{config.q},{config.d},{r.p.numerator},{r.p.denominator},"
                     f"{r.trial},{r.sample_size},{r.alpha},{r.mode},{r.millis}")
    return "\n".join(lines) + "\n"


# -- N(q, d, k) --------------------------------------------------------------------

def count_igp_ksets(q, d, k, node_budget=50_000_000,
                    space_budget=DEFAULT_SPACE_BUDGET):
    """Exact count of general-position k-subsets of GF(q)^d by pruned DFS."""
    if k < 1:
        raise InputError("k must be >= 1")
    x = full_space_cached(q, d, space_budget)
    n = x.n
    if k == 1:
        return n
    cache = FlatCache(x)
    nodes = {"count": 0}
    total = {"count": 0}

    def rec(chosen, cand, depth):
        nodes["count"] += 1
        if nodes["count"] > node_budget:
            raise BudgetExceededError(f"count exceeded {node_budget} nodes")
        if depth == k - 1:
            total["count"] += cand.bit_count()
            return
        rest = cand
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            if n - v - 1 < k - depth - 1:
                break
            nxt = (cand & ~((1 << (v + 1)) - 1)) & ~_blocking_masks(
                cache, chosen, v, d)
            chosen.append(v)
            rec(chosen, nxt, depth + 1)
            chosen.pop()

    rec([], (1 << n) - 1, 0)
    return total["count"]


_SPACE_CACHE = {}


def full_space_cached(q, d, budget=DEFAULT_SPACE_BUDGET):
    key = (q, d)
    if key not in _SPACE_CACHE:
        f = make_field(q)
        _SPACE_CACHE[key] = PointSet(f, d, tuple(enumerate_space(f, d, budget)))
    return _SPACE_CACHE[key]
