"""Derivative bounds showing E - F >= 0 near the four tangent triangles.

Each family is the box x0 in [x, x+eps], x1, x2 in [y, y+eps] anchored at a
tangent triangle.  Lower bounds on dA/dx_i and bounds on the angle partials
are evaluated at the box corners where the monotonicity of A and the angles
places the extremes; from them follow the slopes m below which the excess
grows faster than the potential.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Tuple

from .certificate import FAIL, PASS, Certificate, iv_json
from .ival import Interval, abs_iv, sqrt_iv
from .potential import slope_vanishes
from .trigeom import LARGE, SMALL

FAMILIES = ("rrr", "111", "1rr", "r11")

_RADII = {
    "rrr": (SMALL, SMALL, SMALL),
    "111": (LARGE, LARGE, LARGE),
    "1rr": (LARGE, SMALL, SMALL),
    "r11": (SMALL, LARGE, LARGE),
}


class EpsilonTooLarge(ValueError):
    """The epsilon-box contains non-acute triangles."""


def family_anchor(family: str, c) -> Tuple[Interval, Interval]:
    """Edge lengths (x, y) of the tangent triangle the family is built on."""
    r = c.r
    two = Interval.point(2)
    return {
        "rrr": (2 * r, 2 * r),
        "111": (two, two),
        "1rr": (2 * r, 1 + r),
        "r11": (two, 1 + r),
    }[family]


def family_radii(family: str):
    return _RADII[family]


def _sin_from_edges(opp: Interval, a: Interval, b: Interval) -> Interval:
    cos = (a.sqr() + b.sqr() - opp.sqr()) / (2 * a * b)
    return sqrt_iv(1 - cos.sqr())


@dataclass
class LocalBoundSet:
    family: str
    epsilon: Fraction
    a_bounds: Tuple[Interval, Interval, Interval]
    b_bounds: Tuple[Interval, Interval, Interval]
    c_bounds: Tuple[Interval, Interval, Interval]
    d_bounds: Tuple[Interval, Interval, Interval]
    phi1_bounds: Tuple[Interval, Interval, Interval]
    sine_bounds: Dict[str, Interval]
    acute_margin: Interval
    m_bounds: Tuple[Interval, Interval, Interval] = field(default=None)


def _check_acute(x, y, eps) -> Interval:
    """Smallest x_j² + x_k² - x_i² over the box; must be positive."""
    xe, ye = x + eps, y + eps
    # opposite the distinguished edge, then opposite one of the legs
    g0 = 2 * y.sqr() - xe.sqr()
    g1 = x.sqr() + y.sqr() - ye.sqr()
    return g0 if g0.lo < g1.lo else g1


def area_partial_bounds(family: str, epsilon, c) -> Tuple[Interval, Interval, Interval]:
    """Lower bounds on dA/dx_i over the epsilon-box."""
    return _bounds(family, epsilon, c).a_bounds


def angle_partial_bounds(family: str, epsilon, c) -> LocalBoundSet:
    return _bounds(family, epsilon, c)


def _bounds(family: str, epsilon, c) -> LocalBoundSet:
    eps = Interval.from_fraction(Fraction(epsilon))
    x, y = family_anchor(family, c)
    xe, ye = x + eps, y + eps

    acute = _check_acute(x, y, eps)
    if acute.lo <= 0.0:
        raise EpsilonTooLarge(f"family {family}: eps={epsilon} admits non-acute triangles")

    # A increases in every edge, so its maximum is at the far corner
    a_max = xe * sqrt_iv(4 * ye.sqr() - xe.sqr()) / 4
    a0 = x * (2 * y.sqr() - xe.sqr()) / (8 * a_max)
    ai = y * (x.sqr() + y.sqr() - ye.sqr()) / (8 * a_max)

    s0 = _sin_from_edges(x, ye, ye)       # sin(phi0) is smallest here
    s0p = _sin_from_edges(xe, y, y)       # and largest here
    s1 = _sin_from_edges(y, xe, ye)       # sin(phi1) at x1=y, x0=x+eps, x2=y+eps

    # d(phi0)/dx_j, two-sided
    c0 = x / (ye.sqr() * s0p)
    d0 = xe / (y.sqr() * s0)
    ci = -(ye.sqr() + xe.sqr() - y.sqr()) / (2 * y ** 3 * s0)
    di = -(y.sqr() + x.sqr() - ye.sqr()) / (2 * ye ** 3 * s0p)

    # |d(phi1)/dx_j| upper bounds; phi2 follows by the x1 <-> x2 symmetry
    p10 = (xe.sqr() + ye.sqr() - y.sqr()) / (2 * x.sqr() * y * s1)
    p11 = ye / (x * y * s1)
    p12 = (2 * ye.sqr() - x.sqr()) / (2 * y.sqr() * x * s1)

    # b_j bounds sum_i |d(phi_i)/dx_j|
    b0 = abs_iv(d0) + 2 * p10
    b1 = _abs_max(ci, di) + p11 + p12

    return LocalBoundSet(
        family=family,
        epsilon=Fraction(epsilon),
        a_bounds=(a0, ai, ai),
        b_bounds=(b0, b1, b1),
        c_bounds=(c0, ci, ci),
        d_bounds=(d0, di, di),
        phi1_bounds=(p10, p11, p12),
        sine_bounds={"S0": s0, "S0_prime": s0p, "S1": s1},
        acute_margin=acute,
    )


def _abs_max(lo_bound: Interval, hi_bound: Interval) -> Interval:
    """Upper bound of |t| for lo_bound <= t <= hi_bound."""
    a, b = abs_iv(lo_bound), abs_iv(hi_bound)
    return a if a.hi >= b.hi else b


def m_thresholds(family: str, epsilon, c) -> LocalBoundSet:
    """Attach the per-edge slope thresholds to the family's bound set."""
    bs = _bounds(family, epsilon, c)
    half = (1 - c.r.sqr()) / 2
    out = []
    for j in range(3):
        gain = c.delta * bs.a_bounds[j]
        if family == "1rr":
            # D = pi r²/2 + (1 - r²)/2 * phi0 grows with phi0
            gain = gain - half * bs.d_bounds[j]
        elif family == "r11":
            # D = pi r²/2 - (1 - r²)/2 * phi0
            gain = gain + half * bs.c_bounds[j]
        out.append(gain / bs.b_bounds[j])
    bs.m_bounds = tuple(out)
    return bs


def named_thresholds(epsilon, c) -> Dict[str, Interval]:
    """The six thresholds m_rrr, m_111, m0_1rr, mi_1rr, m0_r11, mi_r11."""
    out = {}
    for fam in FAMILIES:
        m = m_thresholds(fam, epsilon, c).m_bounds
        if fam in ("rrr", "111"):
            out[f"m_{fam}"] = m[0] if m[0].lo <= m[1].lo else m[1]
        else:
            out[f"m0_{fam}"] = m[0]
            out[f"mi_{fam}"] = m[1]
    return out


def local_box(family: str, epsilon, c) -> Tuple[Interval, Interval, Interval]:
    """Edge enclosures of the family's epsilon-box."""
    x, y = family_anchor(family, c)
    eps = Interval.from_fraction(Fraction(epsilon))
    return (Interval(x.lo, (x + eps).hi), Interval(y.lo, (y + eps).hi), Interval(y.lo, (y + eps).hi))


def edge_terms_vanish(family: str, epsilon, c) -> bool:
    radii = family_radii(family)
    box = local_box(family, epsilon, c)
    pairs = ((1, 2), (0, 2), (0, 1))
    return all(slope_vanishes(box[i], radii[j], radii[k]) for i, (j, k) in enumerate(pairs))


def certify_local(epsilon=Fraction(1, 1000), m=Fraction("0.12"), c=None) -> Certificate:
    from .consts import compute_constants

    if c is None:
        c = compute_constants()
    t0 = time.perf_counter()
    slope = Interval.from_fraction(Fraction(m))
    problems = []
    thresholds = {}
    boxes = {}
    for fam in FAMILIES:
        try:
            bs = m_thresholds(fam, epsilon, c)
        except EpsilonTooLarge as exc:
            problems.append(str(exc))
            continue
        if min(a.lo for a in bs.a_bounds) <= 0.0:
            problems.append(f"{fam}: area partial bound not positive")
        if fam in ("1rr", "r11") and not (bs.c_bounds[0].lo > 0.0 and bs.d_bounds[1].hi < 0.0):
            problems.append(f"{fam}: d(phi0)/dx signs not as required")
        if not edge_terms_vanish(fam, epsilon, c):
            problems.append(f"{fam}: edge potential active inside the epsilon-box")
        boxes[fam] = [iv_json(x) for x in local_box(fam, epsilon, c)]
    for name, th in named_thresholds(epsilon, c).items() if not problems else ():
        thresholds[name] = iv_json(th)
        if not th.lo > slope.hi:
            problems.append(f"{name} = {th} does not exceed m = {float(Fraction(m))}")
    return Certificate(
        stage="localprove",
        status=PASS if not problems else FAIL,
        boxes_processed=len(FAMILIES),
        runtime=time.perf_counter() - t0,
        details={
            "epsilon": float(Fraction(epsilon)),
            "m": float(Fraction(m)),
            "thresholds": thresholds,
            "local_boxes": boxes,
            "problems": problems,
        },
    )
