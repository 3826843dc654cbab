"""Interval triangle geometry parameterized by edge lengths.

Vertex ``i`` sits opposite edge ``i``.  All functions accept a
:class:`TriangleBox`, i.e. a set of triangles given by three edge-length
intervals, and return enclosures valid for every triangle in the set.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from .ival import (
    NONNEG,
    UNIT,
    EmptyIntersection,
    Interval,
    acos_iv,
    sqrt_iv,
)


class InfeasibleBox(Exception):
    """The box contains no real (non-degenerate or degenerate) triangle."""


class DistanceUndefined(Exception):
    """The area enclosure touches zero, so circumcenter distances are unbounded."""


class DiscRadius(enum.Enum):
    SMALL = "r"
    LARGE = "1"

    def value_iv(self, c) -> Interval:
        return c.r if self is DiscRadius.SMALL else Interval.point(1.0)

    @classmethod
    def parse(cls, tag: str) -> DiscRadius:
        return cls(tag)

    def __str__(self) -> str:
        return self.value


SMALL = DiscRadius.SMALL
LARGE = DiscRadius.LARGE


def others(i: int) -> Tuple[int, int]:
    return ((1, 2), (0, 2), (0, 1))[i]


@dataclass(frozen=True)
class TriangleBox:
    edges: Tuple[Interval, Interval, Interval]
    radii: Tuple[DiscRadius, DiscRadius, DiscRadius]

    def __post_init__(self):
        if len(self.edges) != 3 or len(self.radii) != 3:
            raise ValueError("a triangle box needs three edges and three radii")
        for x in self.edges:
            if not x.lo > 0.0:
                raise ValueError(f"edge interval {x} must be positive")

    @classmethod
    def from_bounds(cls, bounds: Sequence[Tuple[float, float]], radii="rrr") -> TriangleBox:
        edges = tuple(Interval(float(lo), float(hi)) for lo, hi in bounds)
        return cls(edges, tuple(DiscRadius(t) for t in radii))

    @classmethod
    def exact(cls, x0, x1, x2, radii="rrr") -> TriangleBox:
        return cls.from_bounds([(x0, x0), (x1, x1), (x2, x2)], radii)

    def check_nonoverlap(self, c) -> None:
        """Edge lower bounds must respect the no-overlap distance r_j + r_k."""
        for i, x in enumerate(self.edges):
            j, k = others(i)
            need = self.radii[j].value_iv(c) + self.radii[k].value_iv(c)
            if x.lo < need.lo:
                raise ValueError(f"edge {i} lower bound {x.lo} below disc overlap limit {need}")

    @property
    def pattern(self) -> str:
        return "".join(str(t) for t in self.radii)

    def mirrored(self) -> TriangleBox:
        """Swap vertices 1 and 2 (and their opposite edges)."""
        e, rr = self.edges, self.radii
        return TriangleBox((e[0], e[2], e[1]), (rr[0], rr[2], rr[1]))

    def split(self) -> Tuple[TriangleBox, TriangleBox]:
        """Bisect the widest edge (lowest index on ties)."""
        k = max(range(3), key=lambda i: (self.edges[i].hi - self.edges[i].lo, -i))
        x = self.edges[k]
        mid = 0.5 * (x.lo + x.hi)
        a = list(self.edges)
        b = list(self.edges)
        a[k] = Interval(x.lo, mid)
        b[k] = Interval(mid, x.hi)
        return TriangleBox(tuple(a), self.radii), TriangleBox(tuple(b), self.radii)

    @property
    def max_width(self) -> float:
        return max(x.hi - x.lo for x in self.edges)


def cos_angle(t: TriangleBox, i: int) -> Interval:
    j, k = others(i)
    x = t.edges
    return (x[j].sqr() + x[k].sqr() - x[i].sqr()) / (2 * x[j] * x[k])


def angle(t: TriangleBox, i: int) -> Interval:
    """Angle at vertex ``i`` by the law of cosines."""
    try:
        cos = cos_angle(t, i).intersect(UNIT)
    except EmptyIntersection:
        raise InfeasibleBox(f"cosine at vertex {i} outside [-1, 1]") from None
    return acos_iv(cos)


def area_radicand(t: TriangleBox) -> Interval:
    """16 A^2 in the expanded form 2x0²x1² + 2x0²x2² + 2x1²x2² - x0⁴ - x1⁴ - x2⁴."""
    s0, s1, s2 = (x.sqr() for x in t.edges)
    return 2 * (s0 * s1 + s0 * s2 + s1 * s2) - s0.sqr() - s1.sqr() - s2.sqr()


def area(t: TriangleBox) -> Interval:
    rad = area_radicand(t)
    if rad.hi < 0.0:
        raise InfeasibleBox("negative area radicand")
    return sqrt_iv(rad.intersect(NONNEG)) / 4


def signed_distance(t: TriangleBox, i: int) -> Interval:
    """Signed distance from the circumcenter to edge ``i``.

    Positive when the circumcenter lies on the same side as vertex ``i``.
    """
    a = area(t)
    if a.lo <= 0.0:
        raise DistanceUndefined(f"area enclosure {a} touches zero")
    j, k = others(i)
    x = t.edges
    return x[i] * (x[j].sqr() + x[k].sqr() - x[i].sqr()) / (8 * a)


def circumradius(t: TriangleBox) -> Interval:
    a = area(t)
    x = t.edges
    num = x[0] * x[1] * x[2]
    if a.lo <= 0.0:
        lo = (num / (4 * a)).lo if a.hi > 0.0 else float("inf")
        return Interval(lo, float("inf"))
    return num / (4 * a)


def _cos_upper_monotone(t: TriangleBox, i: int) -> float:
    """Upper bound for cos(angle i), evaluated at a box corner when possible.

    cos(phi_i) always decreases in x_i.  In x_j it increases whenever
    x_j² + x_i² - x_k² > 0 throughout the box (and decreases when that
    quantity is negative).  If both monotonicity directions are certified,
    the maximum sits at a corner; otherwise fall back to the plain interval
    evaluation.
    """
    j, k = others(i)
    x = t.edges
    corner = [None, None, None]
    corner[i] = x[i].lo
    for a, b in ((j, k), (k, j)):
        g = x[a].sqr() + x[i].sqr() - x[b].sqr()
        if g.lo > 0.0:
            corner[a] = x[a].hi
        elif g.hi < 0.0:
            corner[a] = x[a].lo
        else:
            return cos_angle(t, i).hi
    pt = TriangleBox(tuple(Interval.point(v) for v in corner), t.radii)
    return min(cos_angle(pt, i).hi, cos_angle(t, i).hi)


def saturation_prune(t: TriangleBox, c) -> bool:
    """True when no triangle in the box can occur in a saturated packing.

    A saturated packing has every Delaunay circumradius at most 1 + r.  The
    box is rejected when a certified lower bound on the circumradius exceeds
    that, or when the triangle inequality fails outright.
    """
    rho = c.one_plus_r
    x = t.edges
    for i in range(3):
        j, k = others(i)
        if x[i].lo > (2 * rho).hi:
            return True
        if x[i].lo > (x[j] + x[k]).hi:
            return True
    try:
        a = area(t)
    except InfeasibleBox:
        return True
    if a.hi < c.area_floor.lo:
        return True
    # R = x0 x1 x2 / (4A) > 1 + r
    if a.hi < ((x[0] * x[1] * x[2]) / (4 * rho)).lo:
        return True
    # inscribed angle: an obtuse angle with sin(phi_i) < x_i / (2(1+r))
    for i in range(3):
        ratio = x[i].lo / (2 * rho)
        rad = 1 - ratio.sqr()
        if rad.hi < 0.0:
            # x_i > 2(1+r) >= 2R for every triangle in the box
            return True
        thresh = sqrt_iv(rad)
        if _cos_upper_monotone(t, i) < -thresh.hi:
            return True
    return False


def signed_distance_float(x0: float, x1: float, x2: float) -> float:
    """Plain float circumcenter distance to edge 0, for empirical checks."""
    s0, s1, s2 = x0 * x0, x1 * x1, x2 * x2
    rad = 2 * (s0 * s1 + s0 * s2 + s1 * s2) - s0 * s0 - s1 * s1 - s2 * s2
    a = 0.25 * math.sqrt(max(rad, 0.0))
    if a == 0.0:
        return math.copysign(math.inf, s1 + s2 - s0)
    return x0 * (s1 + s2 - s0) / (8 * a)
