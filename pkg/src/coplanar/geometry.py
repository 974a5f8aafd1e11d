"""Points, affine flats, and general-position predicates over GF(q)^d.

A point is a tuple of d field-element encodings.  An AffineFlat is stored
canonically: direction basis in reduced row echelon form plus the unique
base point whose pivot coordinates are zero, so flats compare and hash by
value.  All ranks and solves are exact Gaussian elimination over GF(q).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import (
    EmptySetError,
    InputError,
    MixedFieldsError,
    NotIGPError,
    NotInSpanError,
    TooSmallError,
)
from .field import Field, field_from_json, field_to_json


# -- exact linear algebra ------------------------------------------------------

def rref(field, rows):
    """Reduced row echelon form over GF(q).

    Returns (rows, pivots): nonzero rows only, each with leading 1 in its
    pivot column and zeros above and below.
    """
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return (), ()
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [field.sub(x, field.mul(f, y))
                           for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    out = [tuple(row) for row in rows[:r] if any(row)]
    return tuple(out), tuple(pivots[: len(out)])


def rank(field, rows):
    return len(rref(field, rows)[0])


def reduce_vector(field, vec, basis, pivots):
    """Subtract basis multiples to zero out the pivot coordinates of vec."""
    v = list(vec)
    for row, p in zip(basis, pivots):
        c = v[p]
        if c != 0:
            v = [field.sub(x, field.mul(c, y)) for x, y in zip(v, row)]
    return tuple(v)


def solve(field, columns, target):
    """Solve sum_i x_i * columns[i] = target over GF(q).

    Returns one coefficient list or None when inconsistent.  Free
    variables are set to zero.
    """
    ncols = len(columns)
    nrows = len(target)
    aug = [[columns[j][i] for j in range(ncols)] + [target[i]] for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = field.inv(aug[r][c])
        aug[r] = [field.mul(inv, x) for x in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if aug[i][ncols] != 0:
            return None
    coeff = [0] * ncols
    for row_idx, c in enumerate(pivots):
        coeff[c] = aug[row_idx][ncols]
    return coeff


# -- core types ----------------------------------------------------------------

@dataclass(frozen=True)
class PointSet:
    """A finite set X of points in GF(q)^d.

    Point order is preserved from construction and acts as the canonical
    index order everywhere (witness serialization, RNG candidate ranks).
    """

    field: Field
    d: int
    points: tuple

    def __post_init__(self):
        seen = set()
        for pt in self.points:
            if len(pt) != self.d:
                raise InputError(f"point {pt} does not have dimension {self.d}")
            for c in pt:
                self.field.check(c)
            if pt in seen:
                raise InputError(f"duplicate point {pt}")
            seen.add(pt)
        object.__setattr__(self, "_set", frozenset(self.points))
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})

    @property
    def n(self):
        return len(self.points)

    def __contains__(self, pt):
        return pt in self._set

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def index(self, pt):
        return self._index[pt]

    def subset(self, indices):
        return PointSet(self.field, self.d, tuple(self.points[i] for i in indices))

    def to_json(self):
        return {
            "field": field_to_json(self.field),
            "d": self.d,
            "points": [list(p) for p in self.points],
        }


@dataclass(frozen=True)
class AffineFlat:
    """A k-flat stored as canonical (base, basis).

    basis rows are in reduced row echelon form; base is the unique point of
    the flat with zeros in every pivot coordinate.  Equal flats compare and
    hash equal.
    """

    field: Field
    d: int
    base: tuple
    basis: tuple
    pivots: tuple

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, pt):
        if len(pt) != self.d:
            raise MixedFieldsError("ambient dimension mismatch")
        rem = reduce_vector(self.field, self.field.sub_vec(pt, self.base),
                            self.basis, self.pivots)
        return not any(rem)

    def contains_flat(self, other):
        """True iff other is a subflat of self."""
        if not self.contains(other.base):
            return False
        return all(
            not any(reduce_vector(self.field, v, self.basis, self.pivots))
            for v in other.basis
        )

    def enumerate_points(self):
        """All q^dim points of the flat, deterministic order."""
        f = self.field
        pts = []
        for coeffs in itertools.product(range(f.q), repeat=self.dim):
            v = self.base
            for c, row in zip(coeffs, self.basis):
                if c:
                    v = f.add_vec(v, f.scale_vec(c, row))
            pts.append(v)
        return pts

    def size(self):
        return self.field.q ** self.dim


def make_flat(field, d, base, direction_rows):
    """Canonicalize (base, direction vectors) into an AffineFlat."""
    basis, pivots = rref(field, direction_rows)
    b = reduce_vector(field, base, basis, pivots)
    return AffineFlat(field=field, d=d, base=b, basis=basis, pivots=pivots)


def span(s):
    """Minimal flat containing the point set (affine hull)."""
    if isinstance(s, PointSet):
        field, d, pts = s.field, s.d, s.points
    else:
        raise EmptySetError("span requires a PointSet")
    if not pts:
        raise EmptySetError("span of the empty set is undefined")
    x0 = pts[0]
    rows = [field.sub_vec(p, x0) for p in pts[1:]]
    return make_flat(field, d, x0, rows)


def span_points(field, d, pts):
    """span() for a bare point list; internal fast path."""
    x0 = pts[0]
    rows = [field.sub_vec(p, x0) for p in pts[1:]]
    return make_flat(field, d, x0, rows)


def flat_contains(flat, pt):
    return flat.contains(pt)


def _check_same_space(f1, f2):
    if f1.field != f2.field or f1.d != f2.d:
        raise MixedFieldsError("flats live in different ambient spaces")


def flat_intersect(f1, f2):
    """Intersection flat of f1 and f2, or None when disjoint."""
    _check_same_space(f1, f2)
    field = f1.field
    # common point: solve sum a_i u_i - sum b_j v_j = base2 - base1
    cols = [list(v) for v in f1.basis] + [list(v) for v in f2.basis]
    target = field.sub_vec(f2.base, f1.base)
    if not cols:
        return f1 if f1.base == f2.base else None
    coeff = solve(field, cols, target)
    if coeff is None:
        return None
    x0 = f1.base
    for c, v in zip(coeff[: len(f1.basis)], f1.basis):
        if c:
            x0 = field.add_vec(x0, field.scale_vec(c, v))
    # direction space: Zassenhaus style. Rows [u | u] for f1, [v | 0] for f2;
    # reduced rows with zero left half carry U1 cap U2 in the right half.
    d = f1.d
    zero = [0] * d
    stacked = [list(v) + list(v) for v in f1.basis] + [list(v) + zero for v in f2.basis]
    red, _ = rref(field, stacked)
    inter_rows = [row[d:] for row in red if not any(row[:d])]
    return make_flat(field, d, x0, inter_rows)


def affinely_independent(field, pts):
    """True iff the points are affinely independent over GF(q)."""
    if len(pts) <= 1:
        return True
    x0 = pts[0]
    rows = [field.sub_vec(p, x0) for p in pts[1:]]
    return rank(field, rows) == len(pts) - 1


def is_igp(s):
    """General position test: no k+2 points in any k-flat, 1 <= k <= d-1.

    Equivalent to every subset of size <= d+1 being affinely independent;
    for |S| > d+1 it suffices to check the (d+1)-subsets.
    """
    field, d, pts = s.field, s.d, s.points
    m = len(pts)
    if m <= 2:
        return True
    if m <= d + 1:
        return affinely_independent(field, pts)
    for comb in itertools.combinations(pts, d + 1):
        if not affinely_independent(field, comb):
            return False
    return True


def is_coplanar_kset(s):
    """True iff the k points span a flat of dimension <= k-2."""
    if s.n < 3:
        raise TooSmallError(f"coplanarity is undefined for {s.n} < 3 points")
    return not affinely_independent(s.field, s.points)


def is_critical_coplanar(s):
    """Coplanar, but every proper subset in general position."""
    if s.n < 3:
        raise TooSmallError(f"criticality is undefined for {s.n} < 3 points")
    if not is_coplanar_kset(s):
        return False
    for comb in itertools.combinations(s.points, s.n - 1):
        if not is_igp(PointSet(s.field, s.d, comb)):
            return False
    return True


def support(u, y):
    """The unique minimal X subseteq Y with u in span(X).

    Y must be in general position and affinely independent (|Y| <= d+1);
    the coefficients of u over Y are then unique and the support is the set
    of points with nonzero coefficient.
    """
    field, d = y.field, y.d
    if u in y:
        return PointSet(field, d, (u,))
    if not is_igp(y):
        raise NotIGPError("support requires Y in general position "
                          "(minimal support may otherwise be non-unique)")
    if y.n > d + 1:
        raise NotIGPError(
            f"support is only defined for |Y| <= d+1 = {d + 1}; a larger set "
            "admits non-unique minimal supports")
    pts = y.points
    x0 = pts[0]
    cols = [list(field.sub_vec(p, x0)) for p in pts[1:]]
    target = field.sub_vec(u, x0)
    if not cols:
        raise NotInSpanError(f"{u} is not in the span of Y")
    coeff = solve(field, cols, target)
    if coeff is None:
        raise NotInSpanError(f"{u} is not in the span of Y")
    # check the solution really works (solve() zeroes free variables, and
    # with affinely independent Y the system has full column rank anyway)
    acc = x0
    for c, p in zip(coeff, pts[1:]):
        if c:
            acc = field.add_vec(acc, field.scale_vec(c, field.sub_vec(p, x0)))
    if acc != u:
        raise NotInSpanError(f"{u} is not in the span of Y")
    lam0 = field.sub(1, _field_sum(field, coeff))
    members = [pts[0]] if lam0 != 0 else []
    members += [p for c, p in zip(coeff, pts[1:]) if c != 0]
    return PointSet(field, d, tuple(members))


def _field_sum(field, values):
    acc = 0
    for v in values:
        acc = field.add(acc, v)
    return acc


def points_in_flat(flat, x):
    """X intersect F as a PointSet, in X's point order."""
    if flat.field != x.field or flat.d != x.d:
        raise MixedFieldsError("flat and point set live in different spaces")
    if flat.size() < x.n:
        hit = set(flat.enumerate_points()) & x._set
        pts = tuple(p for p in x.points if p in hit)
    else:
        pts = tuple(p for p in x.points if flat.contains(p))
    return PointSet(x.field, x.d, pts)


# -- point-set files -----------------------------------------------------------

def pointset_to_json(x):
    return x.to_json()


def pointset_from_json(obj):
    """Parse and validate the point-set file format.

    Rejects malformed structure, out-of-range coordinates, and duplicates.
    """
    if not isinstance(obj, dict):
        raise InputError("point-set file must be a JSON object")
    try:
        field = field_from_json(obj["field"])
        d = int(obj["d"])
        raw = obj["points"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed point-set file: {exc}") from exc
    if d < 1:
        raise InputError(f"ambient dimension must be positive, got {d}")
    pts = []
    seen = set()
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != d:
            raise InputError(f"point at index {i} does not have {d} coordinates")
        for c in row:
            if not isinstance(c, int) or not 0 <= c < field.q:
                raise InputError(
                    f"coordinate {c!r} at index {i} is out of range for GF({field.q})")
        pt = tuple(row)
        if pt in seen:
            raise InputError(f"duplicate point at index {i}")
        seen.add(pt)
        pts.append(pt)
    return PointSet(field, d, tuple(pts))


def load_pointset(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return pointset_from_json(obj)


def save_pointset(x, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(x.to_json(), fh, indent=None, separators=(",", ":"))
        fh.write("\n")
