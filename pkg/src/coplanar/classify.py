"""Heavy/balanced flat detection, good-set recognition, and the
structure-vs-randomness classifier.

All density thresholds involving fractional powers q^{j/d} are compared
exactly by raising both sides to the d-th power in integer/rational
arithmetic; no floats touch a decision.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import rand
from .enumeration import FlatCache, coplanar_dsets, igp_subsets, unrank_subset
from .errors import (
    BadDimensionError,
    BadFlatError,
    BadParamsError,
    BadSizeError,
    BudgetExceededError,
    EmptyIntersectionError,
    InputError,
    NotIGPError,
)
from .geometry import PointSet, is_igp, points_in_flat, span

DEFAULT_EPS = Fraction(3, 10)
DEFAULT_C = Fraction(1)
DEFAULT_NODE_BUDGET = 30_000_000
DEFAULT_SAMPLE_SIZE = 200_000


@dataclass(frozen=True)
class Hierarchy:
    """Pigeonhole thresholds gamma << beta_0 << ... << eps_d, all exact."""

    gamma: Fraction
    betas: tuple  # beta_0 .. beta_{d-1}
    epsilons: tuple  # eps_1 .. eps_d

    def validate(self, eps):
        chain = [self.gamma, *self.betas, *self.epsilons, eps]
        for a, b in zip(chain, chain[1:]):
            if not a < b:
                raise BadParamsError(
                    f"hierarchy must be strictly increasing, got {a} >= {b}")


def default_hierarchy(d, eps):
    """gamma = eps^(4d), beta_j = eps^(3d-j), eps_i = eps^(2d-i)."""
    return Hierarchy(
        gamma=eps ** (4 * d),
        betas=tuple(eps ** (3 * d - j) for j in range(d)),
        epsilons=tuple(eps ** (2 * d - i) for i in range(1, d + 1)),
    )


@dataclass(frozen=True)
class EpsilonParams:
    eps: Fraction = DEFAULT_EPS
    C: Fraction = DEFAULT_C
    hierarchy: Hierarchy = None

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise BadParamsError(f"eps must lie in (0,1), got {self.eps}")
        if self.C <= 0:
            raise BadParamsError(f"C must be positive, got {self.C}")

    def resolved_hierarchy(self, d):
        h = self.hierarchy or default_hierarchy(d, self.eps)
        h.validate(self.eps)
        return h


@dataclass(frozen=True)
class BalanceWitness:
    flat: object
    s: int
    witness: object  # the s-flat certifying heaviness at level s
    j: int = None


@dataclass(frozen=True)
class GoodSet:
    """An IGP (j+1)-set with the transversal-balanced partition."""

    indices: tuple  # sorted X-indices of J
    parts: tuple  # V_1 .. V_{i+1} as index tuples
    root: int  # X-index, least element of V_1
    i: int
    j: int


# -- exact window comparisons ---------------------------------------------------

def window_contains(m, s, j, eps, n, q, d):
    """m in (eps^(d-s) n q^(-(j+1)/d), eps^(d-s) n q^(-j/d)] exactly."""
    e = (eps ** (d - s)) * n
    ed = e ** d
    md = Fraction(m) ** d
    return md * q ** (j + 1) > ed and md * q ** j <= ed


def window_level(m, s, eps, n, q, d):
    """The unique j in [0, d-1] whose window contains m, or None."""
    for j in range(d):
        if window_contains(m, s, j, eps, n, q, d):
            return j
    return None


def sparse_enough(m, j, n, q, d):
    """m <= n q^(-j/d) exactly."""
    return Fraction(m) ** d * q ** j <= Fraction(n) ** d


# -- heaviness ------------------------------------------------------------------

def _extend_within(cache, sub, target_dim, outer):
    """Grow sub to exactly target_dim by adding direction vectors of outer."""
    from .geometry import make_flat, reduce_vector

    field, d = outer.field, outer.d
    rows = list(sub.basis)
    flat = sub
    for v in outer.basis:
        if flat.dim >= target_dim:
            break
        if any(reduce_vector(field, v, flat.basis, flat.pivots)):
            rows.append(v)
            flat = make_flat(field, d, sub.base, rows)
    if flat.dim != target_dim:
        raise BadDimensionError(
            f"cannot extend a {sub.dim}-flat to dimension {target_dim} inside "
            f"a {outer.dim}-flat")
    return flat


def is_heavy(f, s, eps, x, cache=None, want_witness=False):
    """(s,eps,X)-heaviness of the flat f: some s-flat F' inside f holds at
    least eps^(dim f - s) of X's points in f.

    Candidate s-flats are spans of (s+1)-subsets of X cap f (extended to
    dimension s when degenerate); an optimal witness can always be chosen
    of this form.
    """
    if not 0 <= s <= f.dim:
        raise BadDimensionError(f"s={s} outside [0, dim={f.dim}]")
    if cache is None:
        cache = FlatCache(x)
    inter = cache.indices(f)
    m = len(inter)
    if s == f.dim:
        return (True, f) if want_witness else True
    bound = (eps ** (f.dim - s)) * m
    if m <= s:
        # span of everything in f has dimension < s; any s-flat over it
        # holds all m points, and m >= eps^k * m always
        from .geometry import make_flat
        base = (cache.span_idx(tuple(inter)) if m
                else make_flat(f.field, f.d, f.base, ()))
        wit = _extend_within(cache, base, s, f)
        return (True, wit) if want_witness else True
    for comb in itertools.combinations(inter, s + 1):
        flat = cache.span_idx(comb)
        if flat.dim < s:
            flat = _extend_within(cache, flat, s, f)
        if Fraction(cache.count(flat)) >= bound:
            return (True, flat) if want_witness else True
    return (False, None) if want_witness else False


def balance_dim(f, eps, x, cache=None):
    """Minimal s at which f is (s,eps,X)-heavy; f is then (s,eps,X)-balanced."""
    if cache is None:
        cache = FlatCache(x)
    key = ("bdim", f, eps)
    got = cache.memo.get(key)
    if got is not None:
        return got
    if cache.count(f) == 0:
        raise EmptyIntersectionError("balance dimension needs X cap F nonempty")
    for s in range(f.dim + 1):
        if is_heavy(f, s, eps, x, cache=cache):
            cache.memo[key] = s
            return s
    raise AssertionError("unreachable: s = dim(F) is always heavy")


def is_sj_balanced(f, s, j, eps, x, n, q, d, cache=None):
    """(s,j,eps,X)-balanced: balanced at s with the density window at level j."""
    if not 0 <= j <= d - 1:
        raise BadParamsError(f"j={j} outside [0, {d - 1}]")
    if s != f.dim:
        raise BadParamsError(f"s={s} must equal dim(F)={f.dim}")
    if cache is None:
        cache = FlatCache(x)
    m = cache.count(f)
    if m == 0:
        return False
    if not window_contains(m, s, j, eps, n, q, d):
        return False
    return balance_dim(f, eps, x, cache=cache) == s


# -- good sets ------------------------------------------------------------------

def _partition_sizes(i, j):
    return (math.ceil((j - i) / 2) + 1, math.floor((j - i) / 2) + 1) + (1,) * (i - 1)


def is_good_set(j_set, i, eps, x, cache=None):
    """Recognize an (i,eps,X)-good (j+1)-set; returns a GoodSet or None.

    The partition is found by exhaustive search in canonical index order;
    the root is the least point of V_1.
    """
    if cache is None:
        cache = FlatCache(x)
    n, q, d = x.n, x.field.q, x.d
    jj = j_set.n - 1
    if not (1 <= i < jj <= d - 1):
        raise BadSizeError(
            f"|J|={j_set.n} needs d-1 >= j > i >= 1 with j=|J|-1 (i={i}, d={d})")
    if not is_igp(j_set):
        raise NotIGPError("J must be in general position")
    try:
        indices = tuple(sorted(x.index(p) for p in j_set.points))
    except KeyError as exc:
        raise InputError(f"J contains a point outside X: {exc}") from exc
    flat_j = cache.span_idx(indices)
    if not sparse_enough(cache.count(flat_j), jj, n, q, d):
        return None
    sizes = _partition_sizes(i, jj)
    pool = list(indices)
    for v1 in itertools.combinations(pool, sizes[0]):
        rest1 = [p for p in pool if p not in v1]
        for v2 in itertools.combinations(rest1, sizes[1]):
            singles = tuple((p,) for p in rest1 if p not in v2)
            parts = (v1, v2) + singles
            if _transversals_balanced(parts, i, jj, eps, x, cache):
                return GoodSet(indices=indices, parts=parts, root=min(v1),
                               i=i, j=jj)
    return None


def _transversals_balanced(parts, i, j, eps, x, cache):
    n, q, d = x.n, x.field.q, x.d
    for transversal in itertools.product(*parts):
        flat = cache.span_idx(tuple(sorted(transversal)))
        if flat.dim != i:
            return False
        if not is_sj_balanced(flat, i, j, eps, x, n, q, d, cache=cache):
            return False
    return True


def good_ratio_check(good, f, x, eps, cache=None):
    """Density-ratio bound for a good set J against a (j-1)-flat F inside
    F_J avoiding the root: |F_J cap X| / |(F_J minus F) cap X| <= eps^-d q^(1/d).

    Returns False (degenerate, flagged) when the denominator is empty.
    """
    if cache is None:
        cache = FlatCache(x)
    d, q = x.d, x.field.q
    flat_j = cache.span_idx(good.indices)
    root_pt = x.points[good.root]
    if f.dim != good.j - 1:
        raise BadFlatError(f"F must be a ({good.j - 1})-flat, got dim {f.dim}")
    if not flat_j.contains_flat(f):
        raise BadFlatError("F is not contained in F_J")
    if f.contains(root_pt):
        raise BadFlatError("F contains the root of J")
    a = cache.count(flat_j)
    b = a - (cache.mask(flat_j) & cache.mask(f)).bit_count()
    if b == 0:
        return False
    return Fraction(a, b) ** d <= q / eps ** (d * d)


# -- the classifier ---------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationOutcome:
    """Result of the structure-vs-randomness dispatch.

    case is one of "structure", "balanced_high", "balanced_low", "no_case";
    the last is a legitimate desk-scale outcome reported with its measured
    counts rather than coerced into a theorem case.
    """

    case: str
    n: int
    q: int
    d: int
    coplanar_count: int
    coplanar_estimated: bool = False
    coplanar_ci95: tuple = None
    i: int = None
    j: int = None
    balanced: tuple = ()
    good_sets: tuple = ()
    window_counts: dict = dc_field(default_factory=dict)
    thresholds: dict = dc_field(default_factory=dict)
    warnings: tuple = ()
    seed: int = 0

    def to_json(self):
        return {
            "case": self.case,
            "n": self.n,
            "q": self.q,
            "d": self.d,
            "coplanar_count": self.coplanar_count,
            "coplanar_estimated": self.coplanar_estimated,
            "coplanar_ci95": list(self.coplanar_ci95) if self.coplanar_ci95 else None,
            "i": self.i,
            "j": self.j,
            "balanced": [list(t) for t in self.balanced],
            "good_sets": [
                {"indices": list(g.indices), "parts": [list(p) for p in g.parts],
                 "root": g.root}
                for g in self.good_sets
            ],
            "window_counts": {f"{i},{j}": c for (i, j), c in self.window_counts.items()},
            "thresholds": self.thresholds,
            "warnings": list(self.warnings),
            "seed": self.seed,
        }


def _sample_coplanar_count(x, seed, samples):
    """Uniform (d+1)-subset sampling estimate of the coplanar count."""
    from .geometry import affinely_independent

    n, d = x.n, x.d
    total = math.comb(n, d + 1)
    draws = rand.uniform_below(seed, total, samples, rand.TAG_SAMPLER)
    hits = 0
    for r in draws:
        idx = unrank_subset(int(r), n, d + 1)
        if not affinely_independent(x.field, [x.points[i] for i in idx]):
            hits += 1
    phat = hits / samples
    est = int(round(phat * total))
    half = 1.96 * math.sqrt(max(phat * (1 - phat), 1e-12) / samples) * total
    return est, (max(est - half, 0.0), est + half)


def classify(x, params, *, seed=0, node_budget=DEFAULT_NODE_BUDGET,
             sample_size=DEFAULT_SAMPLE_SIZE, cache=None,
             good_set_limit=None):
    """Structure-vs-randomness dispatch for the point set X.

    Returns a ClassificationOutcome; every Balanced witness re-validates
    against the definitions, and no threshold is ever coerced: when none
    fires the outcome is the honest "no_case".
    """
    n, q, d = x.n, x.field.q, x.d
    if d < 2:
        raise BadParamsError("classification needs ambient dimension d >= 2")
    eps = params.eps
    hier = params.resolved_hierarchy(d)
    if cache is None:
        cache = FlatCache(x)
    warnings = []
    if Fraction(n) < params.C * q:
        warnings.append(f"n={n} is below C*q={params.C * q}; asymptotic "
                        "thresholds are unreliable at this scale")

    # 1. coplanar (d+1)-set count, exact below budget, sampled above
    estimated = False
    ci = None
    try:
        cop_count = coplanar_dsets(x, cache, mode="count", budget=node_budget)
    except BudgetExceededError:
        estimated = True
        cop_count, ci = _sample_coplanar_count(x, seed, sample_size)
        warnings.append(
            f"coplanar count estimated from {sample_size} samples "
            f"(95% CI {ci[0]:.3g}..{ci[1]:.3g})")

    gamma_threshold = hier.gamma ** (2 * d) * Fraction(n) ** (d + 1)
    thresholds = {
        "eps": str(eps),
        "C": str(params.C),
        "gamma": str(hier.gamma),
        "betas": [str(b) for b in hier.betas],
        "epsilons": [str(e) for e in hier.epsilons],
        "structure": str(gamma_threshold),
    }
    base = dict(n=n, q=q, d=d, coplanar_count=cop_count,
                coplanar_estimated=estimated, coplanar_ci95=ci,
                thresholds=thresholds, seed=seed)

    if Fraction(cop_count) >= gamma_threshold:
        return ClassificationOutcome(case="structure", warnings=tuple(warnings),
                                     **base)

    # 2. window families A_{i,j}: IGP (i+1)-sets whose span density sits in
    # the level-j window
    families = {(i, j): [] for i in range(1, d) for j in range(d)}
    for i in range(1, d):
        for idx, flat in igp_subsets(x, cache, i + 1):
            m = cache.count(flat)
            j = window_level(m, i, eps, n, q, d)
            if j is not None:
                families[(i, j)].append(idx)
    window_counts = {key: len(v) for key, v in families.items()}
    base["window_counts"] = window_counts

    # 3. minimal j with sum_i |A_{i,j}| n^(d-i-1) >= beta_j n^d
    j_star = None
    for j in range(d):
        total = sum(Fraction(len(families[(i, j)])) * n ** (d - i - 1)
                    for i in range(1, d))
        if total >= hier.betas[j] * Fraction(n) ** d:
            j_star = j
            break
    if j_star is None:
        warnings.append("no density level j met its pigeonhole threshold")
        return ClassificationOutcome(case="no_case", warnings=tuple(warnings),
                                     **base)

    # 4. minimal i with |A_{i,j*}| >= beta_{j*} eps_i n^(i+1)
    i_star = None
    for i in range(1, d):
        if (Fraction(len(families[(i, j_star)]))
                >= hier.betas[j_star] * hier.epsilons[i - 1] * Fraction(n) ** (i + 1)):
            i_star = i
            break
    if i_star is None:
        warnings.append(
            f"no uniformity i met its threshold at density level j={j_star}")
        return ClassificationOutcome(case="no_case", warnings=tuple(warnings),
                                     **base)

    # 5. the witness family: members of A_{i*,j*} whose span is genuinely
    # (i*,j*,eps,X)-balanced (window membership alone does not rule out
    # concentration on a lower-dimensional subflat)
    balanced = tuple(
        idx for idx in families[(i_star, j_star)]
        if balance_dim(cache.span_idx(idx), eps, x, cache=cache) == i_star)
    base["i"], base["j"] = i_star, j_star
    if not balanced:
        warnings.append(
            f"window family A_({i_star},{j_star}) has {len(families[(i_star, j_star)])} "
            "members but none is balanced at its own dimension")
        return ClassificationOutcome(case="no_case", warnings=tuple(warnings),
                                     **base)
    base["balanced"] = balanced

    if j_star <= i_star:
        return ClassificationOutcome(case="balanced_high",
                                     warnings=tuple(warnings), **base)

    # 6. low-density case: enumerate good (j*+1)-sets
    goods = []
    for idx, flat in igp_subsets(x, cache, j_star + 1):
        j_pts = x.subset(idx)
        g = is_good_set(j_pts, i_star, eps, x, cache=cache)
        if g is not None:
            goods.append(g)
            if good_set_limit is not None and len(goods) >= good_set_limit:
                warnings.append(f"good-set enumeration stopped at the limit "
                                f"of {good_set_limit}")
                break
    if not goods:
        warnings.append(
            f"low-density case selected (i={i_star}, j={j_star}) but no "
            "good (j+1)-set exists at this scale")
        return ClassificationOutcome(case="no_case", warnings=tuple(warnings),
                                     **base)
    return ClassificationOutcome(case="balanced_low", good_sets=tuple(goods),
                                 warnings=tuple(warnings), **base)
