"""Excess of a triangle and the localizing potential that balances it.

F(T) is the sum of three vertex potentials, which depend only on the angle
at the vertex and the three radii, and three edge potentials, which depend
on the signed circumcenter distance to the edge.  For the four tangent
triangles of the compact packing F equals the excess E exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .ival import Interval, abs_iv, hull, imin
from .trigeom import (
    LARGE,
    SMALL,
    DiscRadius,
    DistanceUndefined,
    TriangleBox,
    angle,
    area,
    others,
    signed_distance,
)

Pattern = Tuple[DiscRadius, DiscRadius, DiscRadius]

# (thresholds, slopes): slope[k] applies on [thresholds[k-1], thresholds[k])
_F_RR = ((Fraction("1.8"), Fraction("2.2")), (Fraction(0), Fraction("0.28"), Fraction("0.4")))
_F_R1 = ((Fraction("2.32"),), (Fraction(0), Fraction("0.06")))
_F_11 = ((), (Fraction(0),))


def _canonical(r0: DiscRadius, r1: DiscRadius, r2: DiscRadius) -> Pattern:
    """v is symmetric in its last two arguments; order them small first."""
    if r1 is LARGE and r2 is SMALL:
        r1, r2 = r2, r1
    return (r0, r1, r2)


@dataclass(frozen=True)
class VertexPotentialTable:
    """Minimum value and minimizing angle of v for each radius pattern."""

    base_value: Dict[Pattern, Interval]
    base_angle: Dict[Pattern, Interval]

    @classmethod
    def from_constants(cls, c) -> VertexPotentialTable:
        x, y = c.param_x, c.param_y
        ea, eb = c.excess_alpha, c.excess_beta
        values = {
            (SMALL, LARGE, LARGE): x * ea,
            (LARGE, SMALL, LARGE): (1 - x) * ea / 2,
            (LARGE, SMALL, SMALL): y * eb,
            (SMALL, SMALL, LARGE): (1 - y) * eb / 2,
            (SMALL, SMALL, SMALL): c.excess_S / 3,
            (LARGE, LARGE, LARGE): c.excess_L / 3,
        }
        angles = {
            (SMALL, LARGE, LARGE): c.angle_alpha,
            (LARGE, SMALL, LARGE): c.angle_alpha_prime,
            (LARGE, SMALL, SMALL): c.angle_beta,
            (SMALL, SMALL, LARGE): c.angle_beta_prime,
            (SMALL, SMALL, SMALL): c.angle_pi3,
            (LARGE, LARGE, LARGE): c.angle_pi3,
        }
        return cls(values, angles)

    def value(self, r0, r1, r2) -> Interval:
        return self.base_value[_canonical(r0, r1, r2)]

    def angle(self, r0, r1, r2) -> Interval:
        return self.base_angle[_canonical(r0, r1, r2)]


_TABLES: Dict[int, VertexPotentialTable] = {}


def potential_table(c) -> VertexPotentialTable:
    key = id(c)
    tab = _TABLES.get(key)
    if tab is None:
        tab = _TABLES[key] = VertexPotentialTable.from_constants(c)
    return tab


def coverage_D(t: TriangleBox, c) -> Interval:
    """Sum over vertices of (angle / 2) * radius²."""
    total = Interval.point(0)
    for i in range(3):
        total = total + angle(t, i) * t.radii[i].value_iv(c).sqr() / 2
    return total


def excess_E(t: TriangleBox, c) -> Interval:
    return c.delta * area(t) - coverage_D(t, c)


def vertex_v(phi: Interval, r0, r1, r2, c, m: Optional[Fraction] = None) -> Interval:
    """min(base + m |phi - base_angle|, cap) over the angle enclosure."""
    tab = potential_table(c)
    slope = Interval.from_fraction(c.slope_m if m is None else Fraction(m))
    raw = tab.value(r0, r1, r2) + slope * abs_iv(phi - tab.angle(r0, r1, r2))
    return imin(raw, c.cap_iv)


def _slope_table(r1: DiscRadius, r2: DiscRadius):
    if r1 is SMALL and r2 is SMALL:
        return _F_RR
    if r1 is LARGE and r2 is LARGE:
        return _F_11
    return _F_R1


def active_slopes(x0: Interval, r1: DiscRadius, r2: DiscRadius):
    """Slopes of every branch of f that some x0 in the enclosure can select."""
    thresholds, slopes = _slope_table(r1, r2)
    out = []
    for k, s in enumerate(slopes):
        lo_ok = k == 0 or x0.hi >= Interval.from_fraction(thresholds[k - 1]).lo
        hi_ok = k == len(thresholds) or x0.lo < Interval.from_fraction(thresholds[k]).hi
        if lo_ok and hi_ok:
            out.append(s)
    return out


def slope_vanishes(x0: Interval, r1: DiscRadius, r2: DiscRadius) -> bool:
    return all(s == 0 for s in active_slopes(x0, r1, r2))


def edge_slope_f(d: Optional[Interval], x0: Interval, r1: DiscRadius, r2: DiscRadius) -> Interval:
    """Piecewise-linear odd function of d; hull over the branches x0 may hit.

    ``d`` may be ``None`` when every reachable branch has slope zero.
    """
    result = None
    for s in active_slopes(x0, r1, r2):
        if s == 0:
            val = Interval.point(0)
        else:
            if d is None:
                raise DistanceUndefined("signed distance needed for a nonzero slope")
            val = Interval.from_fraction(s) * d
        result = val if result is None else hull(result, val)
    return result


def edge_e(t: TriangleBox, i: int) -> Interval:
    """Edge potential of edge ``i`` (endpoint radii are those of the other two vertices)."""
    j, k = others(i)
    x0 = t.edges[i]
    if slope_vanishes(x0, t.radii[j], t.radii[k]):
        return Interval.point(0)
    return edge_slope_f(signed_distance(t, i), x0, t.radii[j], t.radii[k])


def vertex_part(t: TriangleBox, c, m=None) -> Interval:
    total = Interval.point(0)
    for i in range(3):
        j, k = others(i)
        total = total + vertex_v(angle(t, i), t.radii[i], t.radii[j], t.radii[k], c, m)
    return total


def total_F(t: TriangleBox, c, m=None) -> Interval:
    total = vertex_part(t, c, m)
    for i in range(3):
        total = total + edge_e(t, i)
    return total


def margin(t: TriangleBox, c, m=None) -> Interval:
    """E - F, the quantity the global search proves nonnegative."""
    return excess_E(t, c) - total_F(t, c, m)
