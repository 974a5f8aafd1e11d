"""Exact arithmetic in GF(q) for prime powers q = p^k.

Elements are plain ints in [0, q): the base-p packed encoding of the
coefficient tuple (c_0, ..., c_{k-1}) of the residue polynomial, with c_0
the least significant digit.  For prime q (k = 1) the element is just the
residue.  All operations go through an explicit Field context; elements
carry no field reference of their own.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .errors import (
    BudgetExceededError,
    DivisionByZeroError,
    MixedFieldsError,
    NotPrimePowerError,
)

DEFAULT_SPACE_BUDGET = 1 << 20


def _factor_prime_power(q):
    """Return (p, k) with q = p^k, or raise NotPrimePowerError."""
    if q < 2:
        raise NotPrimePowerError(f"q={q} is not a prime power")
    p = None
    m = q
    for cand in range(2, q + 1):
        if cand * cand > m and p is None:
            p = m  # m is prime
            break
        if m % cand == 0:
            p = cand
            break
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    if m != 1:
        raise NotPrimePowerError(f"q={q} has at least two distinct prime divisors")
    return p, k


# -- polynomial helpers over GF(p), low-degree-first coefficient lists -------

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a, m, p):
    """Remainder of a modulo monic polynomial m over GF(p)."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(a)


def _poly_divides(div, a, p):
    return not _poly_mod(a, div, p) if div[-1] == 1 else _poly_mod(a, div, p) == []


def _is_irreducible(poly, p):
    """Trial division by every lower-degree monic polynomial."""
    deg = len(poly) - 1
    for ddeg in range(1, deg):
        for tail in itertools.product(range(p), repeat=ddeg):
            div = list(tail) + [1]
            if _poly_divides(div, poly, p):
                return False
    return True


def _smallest_irreducible(p, k):
    """Lexicographically smallest monic irreducible of degree k over GF(p),
    coefficients compared low-degree-first."""
    for tail in itertools.product(range(p), repeat=k):
        poly = list(tail) + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise NotPrimePowerError(f"no irreducible of degree {k} over GF({p})")  # unreachable


@dataclass(frozen=True)
class Field:
    """Arithmetic context for GF(p^k).

    reduction holds the k+1 coefficients (low-degree-first, monic) of the
    polynomial used to reduce products; for k = 1 it is the identity
    placeholder (0, 1), i.e. the polynomial x.
    """

    p: int
    k: int
    q: int
    reduction: tuple
    _mul_table: tuple = dc_field(default=None, repr=False, compare=False)
    _inv_table: tuple = dc_field(default=None, repr=False, compare=False)

    # -- encoding ------------------------------------------------------------

    def coeffs(self, a):
        """Coefficient tuple (c_0, ..., c_{k-1}) of element a."""
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def encode(self, coeffs):
        a = 0
        for c in reversed(coeffs):
            a = a * self.p + (c % self.p)
        return a

    def check(self, a):
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise MixedFieldsError(f"{a!r} is not an element of GF({self.q})")
        return a

    def elements(self):
        return range(self.q)

    # -- arithmetic ----------------------------------------------------------

    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        mult = 1
        while a or b:
            out += ((a + b) % p) * mult
            a, b = a // p, b // p
            mult *= p
        return out

    def neg(self, a):
        if self.k == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        mult = 1
        while a:
            out += ((-a) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        return self._mul_table[a * self.q + b]

    def inv(self, a):
        if a == 0:
            raise DivisionByZeroError("division by zero")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv_table[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def scale_vec(self, c, vec):
        return tuple(self.mul(c, v) for v in vec)

    def sub_vec(self, u, v):
        return tuple(self.sub(a, b) for a, b in zip(u, v))

    def add_vec(self, u, v):
        return tuple(self.add(a, b) for a, b in zip(u, v))


def _build_tables(p, k, q, reduction):
    """Dense multiplication and inverse tables for small extension fields."""
    mul = [0] * (q * q)
    for a in range(q):
        pa = []
        x = a
        for _ in range(k):
            pa.append(x % p)
            x //= p
        for b in range(a, q):
            pb = []
            x = b
            for _ in range(k):
                pb.append(x % p)
                x //= p
            prod = _poly_mod(_poly_mul(_poly_trim(list(pa)), _poly_trim(list(pb)), p),
                            list(reduction), p)
            enc = 0
            for c in reversed(prod):
                enc = enc * p + c
            mul[a * q + b] = enc
            mul[b * q + a] = enc
    inv = [0] * q
    for a in range(1, q):
        for b in range(1, q):
            if mul[a * q + b] == 1:
                inv[a] = b
                break
        else:
            raise NotPrimePowerError("reduction polynomial is not irreducible")
    return tuple(mul), tuple(inv)


def make_field(q):
    """Construct GF(q).  Deterministic: the reduction polynomial is the
    lexicographically smallest monic irreducible of degree k over GF(p)."""
    p, k = _factor_prime_power(q)
    if k == 1:
        return Field(p=p, k=1, q=q, reduction=(0, 1))
    reduction = _smallest_irreducible(p, k)
    mul_table, inv_table = _build_tables(p, k, q, reduction)
    return Field(p=p, k=k, q=q, reduction=reduction,
                 _mul_table=mul_table, _inv_table=inv_table)


def arith(field, a, b, kind):
    """Binary field operation; kind is one of add/sub/mul/div."""
    field.check(a)
    field.check(b)
    if kind == "add":
        return field.add(a, b)
    if kind == "sub":
        return field.sub(a, b)
    if kind == "mul":
        return field.mul(a, b)
    if kind == "div":
        return field.div(a, b)
    raise ValueError(f"unknown operation kind {kind!r}")


def enumerate_space(field, d, budget=DEFAULT_SPACE_BUDGET):
    """All q^d points of the ambient space, in lexicographic order of the
    integer-encoded coordinates (first coordinate most significant)."""
    total = field.q ** d
    if total > budget:
        raise BudgetExceededError(
            f"q^d = {total} exceeds the enumeration budget {budget}")
    return [tuple(pt) for pt in itertools.product(range(field.q), repeat=d)]


def field_to_json(field):
    return {"p": field.p, "k": field.k, "reduction": list(field.reduction)}


def field_from_json(obj):
    try:
        p, k = int(obj["p"]), int(obj["k"])
    except (KeyError, TypeError, ValueError) as exc:
        raise NotPrimePowerError(f"malformed field spec: {obj!r}") from exc
    f = make_field(p ** k)
    reduction = obj.get("reduction")
    if reduction is not None and tuple(reduction) != f.reduction:
        raise NotPrimePowerError(
            f"reduction polynomial {reduction} does not match the canonical "
            f"choice {list(f.reduction)} for GF({p}^{k})")
    return f
