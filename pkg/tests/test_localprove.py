import math
import time
from fractions import Fraction

import numpy as np
import pytest

from discproof.localprove import (
    FAMILIES,
    EpsilonTooLarge,
    angle_partial_bounds,
    area_partial_bounds,
    certify_local,
    edge_terms_vanish,
    family_anchor,
    local_box,
    m_thresholds,
    named_thresholds,
)

import oracles as O

EPS = Fraction(1, 1000)


def test_thresholds_match_published_table(c):
    for col, eps in enumerate((0, EPS)):
        got = named_thresholds(eps, c)
        for name, pair in O.M_TABLE.items():
            assert abs(got[name].mid - pair[col]) <= 2e-5, (name, eps, got[name])


def test_certify_default_passes(c):
    cert = certify_local(EPS, Fraction("0.12"), c)
    assert cert.passed, cert.details["problems"]
    assert set(cert.details["thresholds"]) == set(O.M_TABLE)
    assert len(cert.details["local_boxes"]) == 4


def test_certify_large_epsilon(c):
    assert certify_local(Fraction("0.018"), Fraction("0.12"), c).passed
    cert = certify_local(Fraction("0.019"), Fraction("0.12"), c)
    assert not cert.passed and "m_rrr" in " ".join(cert.details["problems"])


def test_certify_fails_above_rrr_threshold(c):
    cert = certify_local(EPS, Fraction("0.14"), c)
    assert not cert.passed
    assert cert.details["problems"][0].startswith("m_rrr")


def test_epsilon_too_large(c):
    with pytest.raises(EpsilonTooLarge):
        area_partial_bounds("rrr", Fraction(2), c)
    cert = certify_local(Fraction(2), Fraction("0.12"), c)
    assert not cert.passed


def test_area_partials_equilateral(c):
    # at an equilateral triangle of side s every dA/dx_i equals s / (2 sqrt 3)
    for fam, s in (("rrr", 2 * c.r.mid), ("111", 2.0)):
        a = area_partial_bounds(fam, 0, c)
        for v in a:
            assert abs(v.mid - s / (2 * math.sqrt(3))) < 1e-12


def test_phi0_partial_equilateral(c):
    bs = angle_partial_bounds("rrr", 0, c)
    s = 2 * c.r.mid
    assert abs(bs.c_bounds[0].mid - s / (s * s * math.sin(math.pi / 3))) < 1e-12
    assert abs(bs.c_bounds[0].mid - 1.059) < 1e-3


def test_signs_mixed_families(c):
    for fam in ("1rr", "r11"):
        bs = angle_partial_bounds(fam, EPS, c)
        assert bs.c_bounds[0].lo > 0
        assert bs.d_bounds[1].hi < 0 and bs.d_bounds[2].hi < 0


def test_monotone_in_epsilon(c):
    for fam in FAMILIES:
        prev = angle_partial_bounds(fam, 0, c)
        for eps in (Fraction(1, 1000), Fraction(5, 1000), Fraction(18, 1000)):
            cur = angle_partial_bounds(fam, eps, c)
            for j in range(3):
                assert cur.a_bounds[j].lo <= prev.a_bounds[j].lo
                assert cur.b_bounds[j].hi >= prev.b_bounds[j].hi
            prev = cur


def test_positive_invariants(c):
    for fam in FAMILIES:
        bs = m_thresholds(fam, EPS, c)
        assert min(a.lo for a in bs.a_bounds) > 0
        assert min(m.lo for m in bs.m_bounds) > 0.12


def test_edge_terms_vanish(c):
    for fam in FAMILIES:
        assert edge_terms_vanish(fam, EPS, c)
    box = local_box("r11", EPS, c)
    assert box[0].hi < 2.32


# -- finite differences ------------------------------------------------------

def _area(x):
    x0, x1, x2 = x
    return 0.25 * math.sqrt(2 * (x0**2 * x1**2 + x0**2 * x2**2 + x1**2 * x2**2) - x0**4 - x1**4 - x2**4)


def _angle(x, i):
    j, k = [q for q in range(3) if q != i]
    return math.acos((x[j] ** 2 + x[k] ** 2 - x[i] ** 2) / (2 * x[j] * x[k]))


def _partial(f, x, j, h=1e-6):
    xp, xm = list(x), list(x)
    xp[j] += h
    xm[j] -= h
    return (f(xp) - f(xm)) / (2 * h)


def finite_difference_violations(c, fam, samples=1000):
    """Sampled points where a central difference escapes a derivative bound."""
    bs = angle_partial_bounds(fam, EPS, c)
    x, y = family_anchor(fam, c)
    eps = float(EPS)
    rng = np.random.default_rng(FAMILIES.index(fam))
    tol = 1e-7
    violations = []
    for _ in range(samples):
        pt = [rng.uniform(x.hi, x.lo + eps), rng.uniform(y.hi, y.lo + eps), rng.uniform(y.hi, y.lo + eps)]
        dA = [_partial(_area, pt, j) for j in range(3)]
        dphi = [[_partial(lambda p, i=i: _angle(p, i), pt, j) for j in range(3)] for i in range(3)]
        for j in range(3):
            if dA[j] < bs.a_bounds[j].lo - tol:
                violations.append(("a", j, pt))
            if not bs.c_bounds[j].lo - tol <= dphi[0][j] <= bs.d_bounds[j].hi + tol:
                violations.append(("phi0", j, pt))
            total = sum(abs(dphi[i][j]) for i in range(3))
            if total > bs.b_bounds[j].hi + tol:
                violations.append(("b", j, pt))
            # phi1 directly, phi2 through the mirror x1 <-> x2
            if abs(dphi[1][j]) > bs.phi1_bounds[j].hi + tol:
                violations.append(("phi1", j, pt))
            mj = (0, 2, 1)[j]
            if abs(dphi[2][mj]) > bs.phi1_bounds[j].hi + tol:
                violations.append(("phi2", j, pt))
    return violations


@pytest.mark.parametrize("fam", FAMILIES)
def test_finite_difference_validation(c, fam):
    violations = finite_difference_violations(c, fam)
    assert not violations, violations[:5]


def test_fast(c):
    t0 = time.perf_counter()
    certify_local(EPS, Fraction("0.12"), c)
    named_thresholds(0, c)
    assert time.perf_counter() - t0 < 1.0
