"""Built-in point-set configurations used by the selftest, the test suite,
and the examples in the README.

Each builder returns points in space-enumeration order so runs are
reproducible without an input file.
"""

from __future__ import annotations

from fractions import Fraction

from .classify import EpsilonParams, Hierarchy
from .field import enumerate_space, make_field
from .geometry import PointSet


def full_space(q, d):
    """All q^d points of GF(q)^d."""
    f = make_field(q)
    return PointSet(f, d, tuple(enumerate_space(f, d)))


def parallel_lines(q, count, d=2):
    """Union of `count` parallel lines x0 = c in GF(q)^2."""
    f = make_field(q)
    pts = tuple((x, y) for x in range(count) for y in range(q))
    return PointSet(f, d, pts)


def lines_union_plane(q, directions=(0, 1, None)):
    """Union of concurrent lines through the origin of GF(q)^2.

    directions: slopes (None = vertical line x = 0).
    """
    f = make_field(q)
    pts = []
    for t in range(q):
        for slope in directions:
            p = (0, t) if slope is None else (t, f.mul(slope, t))
            if p not in pts:
                pts.append(p)
    pts.sort()
    return PointSet(f, 2, tuple(pts))


def concurrent_line_planes(q, planes=3, slopes=(0, 1, None)):
    """Union over z in range(planes) of concurrent lines in the plane
    {z = const} of GF(q)^3: slope lines through (0, 0, z).

    The workhorse low-density instance: the lines are dense and balanced,
    their common point makes good 3-sets, and the containing planes stay
    sparse once `planes` is large enough.
    """
    f = make_field(q)
    pts = []
    for z in range(planes):
        for t in range(q):
            for slope in slopes:
                p = (0, t, z) if slope is None else (t, f.mul(slope, t), z)
                if p not in pts:
                    pts.append(p)
    pts.sort()
    return PointSet(f, 3, tuple(pts))


def moment_curve_set(q, d):
    from .randomturan import moment_curve

    return moment_curve(q, d)


def lowdensity_params_f5():
    """Thresholds under which the F_5^3 concurrent-line instance exhibits
    dense balanced lines and good 3-sets (eps = 7/10)."""
    return EpsilonParams(eps=Fraction(7, 10))


def balanced_high_params_f11():
    """Thresholds steering the 8-parallel-lines F_11^2 instance into the
    high-density balanced case rather than the structure case."""
    return EpsilonParams(
        eps=Fraction(1, 2),
        hierarchy=Hierarchy(
            gamma=Fraction(34, 100),
            betas=(Fraction(35, 100), Fraction(36, 100)),
            epsilons=(Fraction(40, 100), Fraction(45, 100)),
        ),
    )
