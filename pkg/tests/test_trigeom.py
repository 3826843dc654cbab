import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discproof.ival import PI, Interval
from discproof.trigeom import (
    LARGE,
    SMALL,
    DiscRadius,
    DistanceUndefined,
    InfeasibleBox,
    TriangleBox,
    angle,
    area,
    circumradius,
    saturation_prune,
    signed_distance,
    signed_distance_float,
)

import oracles as O


def box(x0, x1, x2, radii="rrr"):
    return TriangleBox.exact(x0, x1, x2, radii)


def test_angle_examples(c):
    assert angle(box(2, 2, 2), 0).contains(math.pi / 3)
    right = angle(box(5, 3, 4), 0)
    assert right.contains(math.pi / 2) and right.width < 1e-14
    one_r = (1 + c.r).mid
    assert angle(box(2, one_r, one_r), 0).overlaps(c.angle_alpha)


def test_angle_infeasible():
    with pytest.raises(InfeasibleBox):
        angle(box(5, 1, 1), 0)


def test_area_examples():
    assert area(box(2, 2, 2)).contains(math.sqrt(3))
    assert area(box(3, 4, 5)).contains(6.0)
    assert area(box(2, 1, 1)) == Interval(0.0, 0.0)
    with pytest.raises(InfeasibleBox):
        area(box(5, 1, 1))


def test_signed_distance_examples():
    assert signed_distance(box(5, 3, 4), 0).contains(0.0)
    eq = signed_distance(box(2, 2, 2), 1)
    assert eq.contains(1 / math.sqrt(3)) and eq.width < 1e-14
    assert signed_distance(box(2.4, 1.1, 1.5), 0).hi < 0
    with pytest.raises(DistanceUndefined):
        signed_distance(box(2, 1, 1), 0)


def test_circumradius_examples(c):
    assert circumradius(box(3, 4, 5)).contains(2.5)
    assert circumradius(box(2, 2, 2)).contains(2 / math.sqrt(3))
    s = 2 * c.r.mid
    small = circumradius(box(s, s, s))
    assert abs(small.mid - 0.6295) < 1e-4
    flat = circumradius(box(2, 1, 1))
    assert flat.hi == math.inf


def test_saturation_examples(c):
    t = TriangleBox.from_bounds([(3.0, 3.1), (1.6, 1.7), (1.6, 1.7)])
    assert saturation_prune(t, c)
    assert not saturation_prune(box(2, 2, 2, "111"), c)
    t = TriangleBox.from_bounds([(3.2, 3.3), (1.55, 1.6), (1.55, 1.6)])
    assert saturation_prune(t, c)


def test_saturation_never_prunes_small_circumradius(c):
    rng = np.random.default_rng(5)
    bound = (1 + c.r).lo
    checked = 0
    while checked < 2000:
        x = rng.uniform(2 * c.r.hi, 3.09, 3)
        t = box(*x)
        try:
            R = circumradius(t)
        except InfeasibleBox:
            continue
        if R.hi < bound and area(t).hi >= c.area_floor.hi:
            assert not saturation_prune(t, c)
            checked += 1


def test_box_invariants(c):
    with pytest.raises(ValueError):
        TriangleBox.from_bounds([(0, 1), (1, 2), (1, 2)])
    with pytest.raises(ValueError):
        box(1.0, 1.5, 1.5, "rrr").check_nonoverlap(c)
    box(1.2, 1.6, 1.6, "1rr").check_nonoverlap(c)
    assert DiscRadius.parse("r") is SMALL and LARGE.value_iv(c) == Interval(1.0, 1.0)


def test_split_widest_lowest_index():
    t = TriangleBox.from_bounds([(1, 2), (1, 2), (1, 1.5)])
    a, b = t.split()
    assert a.edges[0] == Interval(1, 1.5) and b.edges[0] == Interval(1.5, 2)
    assert a.edges[1] == t.edges[1]


def test_mirror_swaps():
    t = TriangleBox.from_bounds([(1, 2), (3, 4), (5, 6)], "1rr")
    m = t.mirrored()
    assert m.edges[1] == t.edges[2] and m.radii == t.radii


# -- random point triangles ---------------------------------------------------

def _random_triangles(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x = rng.uniform(0.5, 3.0, 3)
        s = np.sort(x)
        if s[0] + s[1] > s[2] * (1 + 1e-6):
            out.append(tuple(float(v) for v in x))
    return out


def test_angle_sum_encloses_pi():
    for x in _random_triangles(100_000, 1):
        t = box(*x)
        total = angle(t, 0) + angle(t, 1) + angle(t, 2)
        assert total.overlaps(PI)


def test_signed_distance_matches_coordinates():
    for x in _random_triangles(2000, 3):
        p0, p1, p2 = O.triangle_from_edges(*x)
        cx, cy = O.circumcenter(p0, p1, p2)
        # edge 0 runs along the x axis from p1 to p2; vertex 0 is above it
        d = signed_distance(box(*x), 0)
        assert abs(d.mid - cy) < 1e-10 * max(1.0, abs(cy))
        assert abs(signed_distance_float(*x) - cy) < 1e-10 * max(1.0, abs(cy))


def test_circumradius_identity():
    for x in _random_triangles(2000, 4):
        t = box(*x)
        R = circumradius(t)
        d = signed_distance(t, 0)
        rhs = Interval.point(x[0]).sqr() / 4 + d.sqr()
        assert R.sqr().overlaps(rhs)


def test_obtuse_iff_negative_distance():
    for x in _random_triangles(3000, 5):
        t = box(*x)
        for i in range(3):
            phi, d = angle(t, i), signed_distance(t, i)
            if phi.lo > math.pi / 2:
                assert d.hi < 0
            elif phi.hi < math.pi / 2:
                assert d.lo > 0


def test_area_against_mpmath():
    for x in _random_triangles(300, 6):
        ref = O.heron_mp(*x)
        a = area(box(*x))
        assert mpmath.mpf(a.lo) <= ref <= mpmath.mpf(a.hi)


edge = st.floats(1.0, 3.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(edge, edge, edge, st.floats(0, 0.05), st.floats(0, 0.05))
def test_box_encloses_its_points(x0, x1, x2, w, f):
    t = TriangleBox.from_bounds([(x0, x0 + w), (x1, x1 + w), (x2, x2 + w)])
    p = (x0 + f / 0.05 * w, x1 + w / 2, x2)
    pt = box(*p)
    try:
        a_pt = area(pt)
    except InfeasibleBox:
        return
    assert area(t).contains(a_pt)
    for i in range(3):
        try:
            assert angle(t, i).contains(angle(pt, i))
        except InfeasibleBox:
            pytest.fail("box claimed infeasible but contains a real triangle")
