"""The randomized constructions of balanced families of coplanar
(d+1)-sets, the support-enlarging substitution, and co-degree accounting.

Every retention decision is an exact Bernoulli keyed by (seed, member
rank), so families are reproducible bit-for-bit regardless of enumeration
order or thread count.  Candidate tuples that generate the same member set
are collapsed before retention (first candidate in canonical order fixes
the probability), which keeps the analytic expectation equal to the sum of
retention probabilities over distinct members.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import rand
from .auxgraph import build_hf
from .classify import classify, is_sj_balanced
from .enumeration import (
    FlatCache,
    comb_table,
    coplanar_dsets,
    rank_of_subset,
    ranks_of_subsets,
    unrank_subset,
)
from .errors import (
    BadJError,
    BudgetExceededError,
    InputError,
    InvariantViolationError,
    PreconditionViolatedError,
    ProbabilityOverflowError,
    SubstitutionStuckError,
)
from .geometry import (
    PointSet,
    flat_intersect,
    is_critical_coplanar,
    is_igp,
    span_points,
    support,
)

DEFAULT_CANDIDATE_BUDGET = 5_000_000


@dataclass(frozen=True)
class CoplanarFamily:
    """A family S of coplanar (d+1)-subsets of the ground set, stored as
    canonically sorted index tuples."""

    ground: PointSet
    members: tuple
    seed: int = None
    meta: dict = dc_field(default_factory=dict, compare=False)

    @property
    def size(self):
        return len(self.members)

    def points_of(self, member):
        return [self.ground.points[i] for i in member]


@dataclass(frozen=True)
class CodegreeProfile:
    """Exact co-degree maxima Delta_j for 1 <= j <= d+1."""

    delta: dict

    def __post_init__(self):
        js = sorted(self.delta)
        for a, b in zip(js, js[1:]):
            if self.delta[b] > self.delta[a]:
                raise InvariantViolationError(
                    f"Delta_{b}={self.delta[b]} > Delta_{a}={self.delta[a]}")


@dataclass(frozen=True)
class SubstitutionPlan:
    """Forbidden low-dimensional flats inside F_I plus the surviving
    replacement pool (X-indices)."""

    flats: tuple
    pool: tuple


@dataclass(frozen=True)
class MapResult:
    """Outcome of one support-enlarging substitution."""

    indices: tuple  # the produced (j+1)-set, sorted X-indices
    case: str  # "trivial" | "case1" | "case2"
    rounds: int


# -- enumeration of the raw coplanar family -------------------------------------

def all_coplanar_dsets(x, cache=None, node_budget=DEFAULT_CANDIDATE_BUDGET * 4):
    """Every coplanar (d+1)-subset of X as sorted index tuples (exact)."""
    if cache is None:
        cache = FlatCache(x)
    return coplanar_dsets(x, cache, mode="list", budget=node_budget)


def sample_coplanar_dsets(x, count, seed, cache=None):
    """Uniform sample of (d+1)-subsets filtered to coplanar ones; returns
    (members, sampling_fraction) where fraction = count / C(n, d+1)."""
    from .geometry import affinely_independent

    n, d = x.n, x.d
    total = math.comb(n, d + 1)
    draws = rand.uniform_below(seed, total, count, rand.TAG_SAMPLER, 1)
    members = set()
    for r in draws:
        idx = unrank_subset(int(r), n, d + 1)
        if not affinely_independent(x.field, [x.points[i] for i in idx]):
            members.add(idx)
    return sorted(members), Fraction(count, total)


# -- retention ------------------------------------------------------------------

def _retain(x, member_probs, seed, tag):
    """Vectorized exact-Bernoulli retention over distinct members.

    member_probs maps sorted index tuples to Fraction probabilities.
    Returns (retained members, expectation, candidate count).
    """
    n, d = x.n, x.d
    members = sorted(member_probs)
    expectation = sum(member_probs.values(), Fraction(0))
    if not members:
        return [], expectation, 0
    table = comb_table(n, d + 1)
    by_p = {}
    for m in members:
        by_p.setdefault(member_probs[m], []).append(m)
    retained = []
    for p, group in sorted(by_p.items()):
        ranks = ranks_of_subsets(np.array(group, dtype=np.int64), n, d + 1, table)
        accept = rand.bernoulli_exact(seed, ranks, p.numerator, p.denominator, tag)
        retained.extend(m for m, a in zip(group, accept) if a)
    retained.sort()
    return retained, expectation, len(members)


def _verify_members_coplanar(x, members):
    from .geometry import affinely_independent

    for m in members:
        if affinely_independent(x.field, [x.points[i] for i in m]):
            raise InvariantViolationError(
                f"retained member {m} is not coplanar")


# -- structure case ---------------------------------------------------------------

def construct_structure(x, coplanar_members, seed, sampling_fraction=None):
    """Bernoulli(1/q) retention over the given coplanar family."""
    q = x.field.q
    probs = {tuple(m): Fraction(1, q) for m in coplanar_members}
    retained, expectation, candidates = _retain(x, probs, seed, rand.TAG_STRUCTURE)
    meta = {
        "case": "structure",
        "p": str(Fraction(1, q)),
        "candidates": candidates,
        "expectation": str(expectation),
        "expectation_float": float(expectation),
    }
    if sampling_fraction is not None:
        meta["sampling_fraction"] = str(sampling_fraction)
    return CoplanarFamily(ground=x, members=tuple(retained), seed=seed, meta=meta)


# -- high-density case -------------------------------------------------------------

def construct_high(x, i, j, eps, balanced_family, seed, cache=None,
                   candidate_budget=DEFAULT_CANDIDATE_BUDGET):
    """High-density construction: pick a balanced (i+1)-set I, a point u
    making I cup {u} critical coplanar, arbitrary remaining points, and
    retain with probability eps^(d-i) n / (q |F cap X|)."""
    if cache is None:
        cache = FlatCache(x)
    n, q, d = x.n, x.field.q, x.d
    if not (1 <= i <= d - 1 and 0 <= j <= i):
        raise PreconditionViolatedError("high-density case needs 1 <= i <= d-1, j <= i")
    family = [tuple(sorted(ii)) for ii in balanced_family]
    for idx in family:
        flat = cache.span_idx(idx)
        if not is_sj_balanced(flat, i, j, eps, x, n, q, d, cache=cache):
            raise PreconditionViolatedError(
                "balanced-family", f"set {idx} is not ({i},{j})-balanced")
    probs = {}
    generators = {}
    w_size = d - i - 1
    sampled_w = _w_sampling_plan(len(family), x, i, w_size, candidate_budget)
    for idx in sorted(family):
        flat = cache.span_idx(idx)
        m = cache.count(flat)
        p = (eps ** (d - i)) * n / (Fraction(q) * m)
        if p > 1:
            raise ProbabilityOverflowError(
                f"retention probability {p} > 1 on flat with |X cap F| = {m}",
                flat=flat, probability=p)
        fs_masks = 0
        for sub in itertools.combinations(idx, i):
            fs_masks |= cache.mask(cache.span_idx(sub))
        pool = cache.mask(flat) & ~fs_masks
        for u in _bits(pool):
            base = tuple(sorted(idx + (u,)))
            for w_comb in _w_choices(x, base, w_size, sampled_w, seed):
                member = tuple(sorted(base + w_comb))
                if member not in probs:
                    probs[member] = p
                    generators[member] = (idx, u)
    retained, expectation, candidates = _retain(x, probs, seed, rand.TAG_HIGH)
    _verify_members_coplanar(x, retained)
    for member in retained:
        gi, gu = generators[member]
        kernel = x.subset(sorted(gi + (gu,)))
        if not is_critical_coplanar(kernel):
            raise InvariantViolationError(
                f"kernel {sorted(gi + (gu,))} of member {member} is not "
                "critical coplanar")
    meta = {
        "case": "balanced_high",
        "i": i,
        "j": j,
        "eps": str(eps),
        "candidates": candidates,
        "expectation": str(expectation),
        "expectation_float": float(expectation),
        "w_sampled": bool(sampled_w),
    }
    if sampled_w:
        meta["w_weight"] = str(sampled_w[1])
    return CoplanarFamily(ground=x, members=tuple(retained), seed=seed, meta=meta)


def _w_sampling_plan(n_outer, x, i, w_size, budget):
    """Decide whether the W-step must sample instead of enumerating.

    Returns None for full enumeration, else (samples_per_candidate, weight).
    """
    if w_size == 0 or n_outer == 0:
        return None
    n = x.n
    per_u = math.comb(n - (i + 2), w_size)
    volume = n_outer * n * per_u
    if volume <= budget:
        return None
    samples = max(1, budget // max(1, n_outer * n))
    return samples, Fraction(per_u, samples)


def _w_choices(x, base, w_size, sampled, seed):
    """Either every W-completion or a deterministic uniform sample of them."""
    n = x.n
    others = [t for t in range(n) if t not in base]
    if w_size == 0:
        yield ()
        return
    if sampled is None:
        yield from itertools.combinations(others, w_size)
        return
    samples, _weight = sampled
    total = math.comb(len(others), w_size)
    base_key = rank_of_subset(base, n, len(base))
    draws = rand.uniform_below(seed, total, min(samples, total),
                               rand.TAG_SAMPLER, 2, base_key)
    for r in sorted(set(int(v) for v in draws)):
        local = unrank_subset(r, len(others), w_size)
        yield tuple(others[t] for t in local)


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# -- support-enlarging substitution -------------------------------------------------

def substitution_plan(j_set, i_set, u_support, u, x_pt, ambient, cache=None):
    """Forbidden flats and replacement pool for one substitution step.

    Arguments mirror the one-step lemma: J the ambient IGP set, I the
    transversal being repaired, U the current support of u, x the point of
    U cap I being replaced.  Every named precondition failure raises
    PreconditionViolatedError with its clause.
    """
    if cache is None:
        cache = FlatCache(ambient)
    field, d = ambient.field, ambient.d
    jj = j_set.n - 1
    ii = i_set.n - 1
    if not is_igp(j_set):
        raise PreconditionViolatedError("J-igp", "J must be in general position")
    if not (1 <= ii < jj <= d):
        raise PreconditionViolatedError(
            "sizes", f"need 1 <= i < j <= d, got i={ii}, j={jj}")
    if not set(i_set.points) <= set(j_set.points):
        raise PreconditionViolatedError("I-subset", "I must be a subset of J")
    try:
        sup = support(u, j_set)
    except InputError as exc:
        raise PreconditionViolatedError("u-supported", str(exc)) from exc
    if set(sup.points) != set(u_support.points):
        raise PreconditionViolatedError(
            "u-supported", f"u is supported by {sorted(sup.points)}, "
            f"not by the given U")
    if set(i_set.points) <= set(u_support.points):
        raise PreconditionViolatedError("I-not-in-U", "I must not be inside U")
    if x_pt not in u_support or x_pt not in i_set:
        raise PreconditionViolatedError("x-in-U-and-I", "x must lie in U cap I")

    f_i = span_points(field, d, list(i_set.points))
    union = sorted(set(i_set.points) | set(u_support.points))
    flats = []
    for z in union:
        if z == x_pt:
            continue
        rest = [p for p in union if p not in (z, x_pt)] + [u]
        f_rest = span_points(field, d, rest)
        inter = flat_intersect(f_i, f_rest)
        if inter is not None:
            flats.append(inter)
    j_minus = [p for p in j_set.points if p != x_pt]
    inter = flat_intersect(f_i, span_points(field, d, j_minus))
    if inter is not None:
        flats.append(inter)
    flats.append(span_points(field, d, [p for p in i_set.points if p != x_pt]))
    flats = tuple(dict.fromkeys(flats))
    if len(flats) > d + 2:
        raise InvariantViolationError(
            f"substitution produced {len(flats)} > d+2 forbidden flats")
    for fl in flats:
        if fl.dim > ii - 1:
            raise InvariantViolationError(
                f"forbidden flat has dimension {fl.dim} > i-1 = {ii - 1}")
    pool_mask = cache.mask(f_i)
    for fl in flats:
        pool_mask &= ~cache.mask(fl)
    return SubstitutionPlan(flats=flats, pool=tuple(_bits(pool_mask)))


def support_enlarging_map(u, good, gammas, x, i, j, eps, cache=None):
    """The map g_u: produce a (j+1)-set whose support of u is everything,
    so that the output together with u is critical coplanar.

    gammas maps transversal i-flats to their substitution graphs; a missing
    or exhausted graph raises SubstitutionStuckError (callers skip and log).
    """
    if cache is None:
        cache = FlatCache(x)
    n, d = x.n, x.d
    j_idx = good.indices
    root = good.root
    flat_j = cache.span_idx(j_idx)
    flat_minus = cache.span_idx(tuple(t for t in j_idx if t != root))
    u_idx = x.index(u)
    if u_idx in j_idx:
        raise PreconditionViolatedError("u-in-J", "u must not belong to J")
    if not ((cache.mask(flat_j) >> u_idx) & 1) or ((cache.mask(flat_minus) >> u_idx) & 1):
        raise PreconditionViolatedError(
            "u-position", "u must lie in (F_J minus F_{J minus root}) cap X")

    singles = tuple(t for part in good.parts[2:] for t in part)
    j_cur = list(j_idx)
    u_sup = support(u, x.subset(j_idx))
    u_cur = sorted(x.index(p) for p in u_sup.points)
    if set(u_cur) == set(j_cur):
        return MapResult(indices=tuple(sorted(j_cur)), case="trivial", rounds=0)

    v1, v2 = good.parts[0], good.parts[1]
    if set(v1) | set(v2) <= set(u_cur):
        # single substitution of some non-root vertex of V1
        w = min(t for t in v1 if t != root)
        i_idx = tuple(sorted((w, min(v2)) + singles))
        new_j, _ = _substitute(x, cache, gammas, j_cur, u_cur, u, i_idx, w)
        _check_full_support(x, u, new_j)
        return MapResult(indices=tuple(sorted(new_j)), case="case1", rounds=1)

    path = _alternating_path(v1, v2, root)
    rounds = 0
    removed = set()
    while rounds <= j + 1:
        if set(u_cur) == set(j_cur):
            return MapResult(indices=tuple(sorted(j_cur)), case="case2",
                             rounds=rounds)
        edge = next(((a, b) for a, b in zip(path, path[1:])
                     if a in u_cur and b not in u_cur), None)
        if edge is None:
            raise SubstitutionStuckError("no usable edge along the path")
        w, v = edge
        if v in removed or v not in j_cur:
            raise SubstitutionStuckError("path partner already substituted away")
        i_idx = tuple(sorted((w, v) + singles))
        j_cur, u_cur = _substitute(x, cache, gammas, j_cur, u_cur, u, i_idx, w)
        removed.add(w)
        rounds += 1
    raise InvariantViolationError(
        f"substitution did not terminate within j+1 = {j + 1} rounds")


def _alternating_path(v1, v2, root):
    from .auxgraph import alternating_ham_path

    b = [root] + [t for t in sorted(v1) if t != root]
    a = sorted(v2)
    return alternating_ham_path(a, b, root)


def _substitute(x, cache, gammas, j_cur, u_cur, u, i_idx, w):
    """One substitution step: replace w by a substitution-graph neighbor
    inside the plan's replacement pool."""
    flat_i = cache.span_idx(i_idx)
    gamma = gammas.get(flat_i)
    if gamma is None:
        raise SubstitutionStuckError(
            "no substitution graph available for the transversal flat")
    plan = substitution_plan(
        x.subset(sorted(j_cur)), x.subset(i_idx),
        x.subset(sorted(u_cur)), u, x.points[w], x, cache=cache)
    pool = set(plan.pool)
    a_pos = {pt: t for t, pt in enumerate(gamma.part_a)}
    w_pt = x.points[w]
    if w_pt not in a_pos:
        raise SubstitutionStuckError("vertex missing from the substitution graph")
    nbrs = [x.index(gamma.part_b[b]) for b in gamma.neighbors_a(a_pos[w_pt])]
    w_new = next((t for t in sorted(nbrs) if t in pool), None)
    if w_new is None:
        raise SubstitutionStuckError("neighbor set exhausted by forbidden flats")
    j_next = sorted(t for t in j_cur if t != w) + [w_new]
    u_next = sorted((set(u_cur) | set(i_idx) | {w_new}) - {w})
    sup = support(u, x.subset(sorted(j_next)))
    got = sorted(x.index(p) for p in sup.points)
    if got != u_next:
        raise InvariantViolationError(
            f"support after substitution is {got}, expected {u_next}")
    return sorted(j_next), u_next


def _check_full_support(x, u, j_indices):
    sup = support(u, x.subset(sorted(j_indices)))
    if set(x.index(p) for p in sup.points) != set(j_indices):
        raise InvariantViolationError(
            "single-step substitution did not enlarge the support to all of J'")


# -- low-density case ----------------------------------------------------------------

def build_substitution_graphs(x, goods, i, eps, cache=None):
    """One substitution graph per transversal i-flat of the good sets.

    Returns (gammas, failures): flats whose support graph or tight cycle
    cannot be built at this scale land in failures with the reason string.
    """
    if cache is None:
        cache = FlatCache(x)
    gammas = {}
    failures = {}
    for good in goods:
        for transversal in itertools.product(*good.parts):
            flat = cache.span_idx(tuple(sorted(transversal)))
            if flat in gammas or flat in failures:
                continue
            try:
                gammas[flat] = build_hf(flat, flat, x, i, eps, cache=cache)
            except Exception as exc:  # noqa: BLE001 - reason recorded, honest skip
                failures[flat] = f"{type(exc).__name__}: {exc}"
    return gammas, failures


def construct_low(x, i, j, eps, goods, seed, cache=None, gammas=None,
                  candidate_budget=DEFAULT_CANDIDATE_BUDGET):
    """Low-density construction via the support-enlarging substitution.

    Skips (and counts) instances whose substitution gets stuck; retention
    probability is eps^d n / (q |(F_J minus F_{J minus root}) cap X|).
    """
    if cache is None:
        cache = FlatCache(x)
    n, q, d = x.n, x.field.q, x.d
    if not (1 <= i < j <= d - 1):
        raise PreconditionViolatedError("low-density case needs 1 <= i < j <= d-1")
    gamma_failures = {}
    if gammas is None:
        gammas, gamma_failures = build_substitution_graphs(x, goods, i, eps, cache)
    probs = {}
    kernels = {}
    stats = {"stuck": 0, "trivial": 0, "case1": 0, "case2": 0}
    preimages = {}
    w_size = d - j - 1
    for good in sorted(goods, key=lambda g: g.indices):
        j_idx = good.indices
        flat_j = cache.span_idx(j_idx)
        flat_minus = cache.span_idx(tuple(t for t in j_idx if t != good.root))
        denom_mask = cache.mask(flat_j) & ~cache.mask(flat_minus)
        denom = denom_mask.bit_count()
        if denom == 0:
            stats["stuck"] += 1
            continue
        p = (eps ** d) * n / (Fraction(q) * denom)
        if p > 1:
            raise ProbabilityOverflowError(
                f"retention probability {p} > 1 for a good set with "
                f"|(F_J minus F_(J-root)) cap X| = {denom}",
                flat=flat_j, probability=p)
        pool = denom_mask
        for t in j_idx:
            pool &= ~(1 << t)
        for u_idx in _bits(pool):
            u_pt = x.points[u_idx]
            try:
                res = support_enlarging_map(u_pt, good, gammas, x, i, j, eps,
                                            cache=cache)
            except SubstitutionStuckError:
                stats["stuck"] += 1
                continue
            stats[res.case] += 1
            _verify_map_output(x, cache, res.indices, u_idx, flat_j, flat_minus)
            key = (u_idx, res.indices)
            preimages[key] = preimages.get(key, 0) + 1
            base = tuple(sorted(res.indices + (u_idx,)))
            for w_comb in _w_choices(x, base, w_size, None, seed):
                member = tuple(sorted(base + w_comb))
                if member not in probs:
                    probs[member] = p
                    kernels[member] = base
    retained, expectation, candidates = _retain(x, probs, seed, rand.TAG_LOW)
    _verify_members_coplanar(x, retained)
    for member in retained:
        kernel = x.subset(kernels[member])
        if not is_critical_coplanar(kernel):
            raise InvariantViolationError(
                f"kernel {kernels[member]} of member {member} is not "
                "critical coplanar")
    max_preimage = max(preimages.values(), default=0)
    meta = {
        "case": "balanced_low",
        "i": i,
        "j": j,
        "eps": str(eps),
        "candidates": candidates,
        "expectation": str(expectation),
        "expectation_float": float(expectation),
        "stuck": stats["stuck"],
        "map_cases": {k: stats[k] for k in ("trivial", "case1", "case2")},
        "max_preimage_multiplicity": max_preimage,
        "preimage_bound": (12 * d) ** (5 * d),
        "gamma_failures": {str(k.base): v for k, v in gamma_failures.items()},
    }
    return CoplanarFamily(ground=x, members=tuple(retained), seed=seed, meta=meta)


def _verify_map_output(x, cache, g_indices, u_idx, flat_j, flat_minus):
    """A1 and A2 re-checks on a substitution output."""
    kernel = x.subset(tuple(sorted(g_indices + (u_idx,))))
    if not is_critical_coplanar(kernel):
        raise InvariantViolationError(
            f"map output {g_indices} + u={u_idx} is not critical coplanar")
    if cache.span_idx(tuple(sorted(g_indices))) != flat_j:
        raise InvariantViolationError("map output spans a different flat than J")
    ok = any(
        cache.span_idx(tuple(t for t in sorted(g_indices) if t != y)) == flat_minus
        for y in g_indices)
    if not ok:
        raise InvariantViolationError(
            "no vertex removal of the map output recovers F_(J minus root)")


# -- dispatch -------------------------------------------------------------------------

def construct(x, params, seed, cache=None, node_budget=None,
              candidate_budget=DEFAULT_CANDIDATE_BUDGET, sample_size=200_000,
              outcome=None):
    """Classify X and run the matching construction.

    Returns (family, outcome, report).  A no-case outcome yields an empty
    family plus diagnostics; nothing is coerced.
    """
    if cache is None:
        cache = FlatCache(x)
    budget = node_budget if node_budget is not None else DEFAULT_CANDIDATE_BUDGET * 4
    if outcome is None:
        outcome = classify(x, params, seed=seed, node_budget=budget,
                           sample_size=sample_size, cache=cache)
    if outcome.case == "structure":
        if outcome.coplanar_estimated:
            members, fraction = sample_coplanar_dsets(x, sample_size, seed,
                                                      cache=cache)
            family = construct_structure(x, members, seed,
                                         sampling_fraction=fraction)
        else:
            members = all_coplanar_dsets(x, cache=cache, node_budget=budget)
            family = construct_structure(x, members, seed)
    elif outcome.case == "balanced_high":
        family = construct_high(x, outcome.i, outcome.j, params.eps,
                                outcome.balanced, seed, cache=cache,
                                candidate_budget=candidate_budget)
    elif outcome.case == "balanced_low":
        family = construct_low(x, outcome.i, outcome.j, params.eps,
                               outcome.good_sets, seed, cache=cache,
                               candidate_budget=candidate_budget)
    else:
        family = CoplanarFamily(ground=x, members=(), seed=seed,
                                meta={"case": "no_case",
                                      "diagnostics": list(outcome.warnings)})
    report = build_report(family, outcome, params)
    return family, outcome, report


def build_report(family, outcome, params):
    x = family.ground
    q, d = x.field.q, x.d
    bounds = verify_bounds(family, q, d)
    return {
        "case": outcome.case,
        "seed": family.seed,
        "n": x.n,
        "q": q,
        "d": d,
        "eps": str(params.eps),
        "thresholds": outcome.thresholds,
        "family_size": family.size,
        "meta": family.meta,
        "bounds": bounds,
        "warnings": list(outcome.warnings),
    }


# -- co-degrees and empirical constants -----------------------------------------------

def codegree(family, j):
    """Delta_j: the maximum number of members containing a fixed j-subset."""
    d = family.ground.d
    if not 1 <= j <= d + 1:
        raise BadJError(f"j={j} outside [1, d+1={d + 1}]")
    members = family.members
    if not members:
        return 0
    arr = np.array(members, dtype=np.int64)
    n = family.ground.n
    width = d + 1
    codes = []
    for cols in itertools.combinations(range(width), j):
        pack = np.zeros(len(members), dtype=np.int64)
        for c in cols:
            pack = pack * n + arr[:, c]
        codes.append(pack)
    allcodes = np.concatenate(codes)
    _, counts = np.unique(allcodes, return_counts=True)
    return int(counts.max())


def codegree_profile(family):
    d = family.ground.d
    return CodegreeProfile(delta={j: codegree(family, j) for j in range(1, d + 2)})


def verify_bounds(family, q, d, c1_min=None, c2_max=None):
    """Empirical constants against the target shape |S| ~ n^(d+1)/q and
    Delta_j ~ n^(d+1-j) q^(-(d+1-j)/d)."""
    n = family.ground.n
    size = family.size
    c1 = size * q / n ** (d + 1)
    deltas = {}
    c2 = {}
    for j in range(1, d + 2):
        dj = codegree(family, j)
        deltas[j] = dj
        c2[j] = dj * n ** (j - d - 1) * q ** ((d + 1 - j) / d)
    report = {
        "size": size,
        "c1": c1,
        "delta": deltas,
        "c2": {str(j): v for j, v in c2.items()},
    }
    if c1_min is not None:
        report["c1_pass"] = c1 >= c1_min
    if c2_max is not None:
        report["c2_pass"] = all(v <= c2_max for v in c2.values())
    return report


# -- file formats -----------------------------------------------------------------------

def write_family(family, path):
    """JSON lines, one member per line as its sorted point-index array."""
    with open(path, "w", encoding="utf-8") as fh:
        for member in family.members:
            fh.write(json.dumps(list(member), separators=(",", ":")))
            fh.write("\n")


def read_family(path, ground):
    members = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                arr = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno + 1}: invalid JSON") from exc
            if (not isinstance(arr, list)
                    or len(arr) != ground.d + 1
                    or not all(isinstance(v, int) and 0 <= v < ground.n for v in arr)
                    or sorted(arr) != arr or len(set(arr)) != len(arr)):
                raise InputError(
                    f"{path}:{lineno + 1}: not a sorted index array of size "
                    f"{ground.d + 1} over [0, {ground.n})")
            members.append(tuple(arr))
    return CoplanarFamily(ground=ground, members=tuple(members), seed=None,
                          meta={"loaded_from": str(path)})


def write_report(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
