"""Nonnegativity of the vertex potentials summed around each disc center.

Around a center the sum of the n vertex potentials is at least

    sum of base values + m * |2*pi - sum of base angles|

so it suffices to check that bound for every multiset of neighbouring radius
patterns.  Configurations are enumerated up to ``N_MAX`` triangles; larger
vertex degrees are covered by a tail bound, and vertices where some
potential hits the cap are covered by a degree bound.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from .certificate import FAIL, PASS, Certificate, iv_json
from .ival import TWO_PI, Interval, abs_iv, asin_iv
from .potential import potential_table
from .trigeom import LARGE, SMALL, DiscRadius

N_MAX = 24

# neighbour pair patterns for each center, in count order
_PAIRS = {
    SMALL: ((SMALL, SMALL), (SMALL, LARGE), (LARGE, LARGE)),  # n_rrr, n_rr1, n_r11
    LARGE: ((SMALL, SMALL), (SMALL, LARGE), (LARGE, LARGE)),  # n_1rr, n_1r1, n_111
}

# the vertex figures of the compact packing
ZERO_CONFIGS = {(SMALL, (1, 2, 2)), (LARGE, (1, 4, 2))}


@dataclass(frozen=True)
class VertexConfig:
    center: DiscRadius
    counts: Tuple[int, int, int]

    def __post_init__(self):
        if any(n < 0 for n in self.counts):
            raise ValueError("counts must be nonnegative")
        if self.n < 3:
            raise ValueError("a vertex belongs to at least three triangles")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def key(self):
        return (self.center, tuple(self.counts))

    def label(self) -> str:
        c = str(self.center)
        names = [c + "rr", c + "r1", c + "11"]
        return ",".join(f"n_{nm}={k}" for nm, k in zip(names, self.counts))


def _terms(v: VertexConfig, c):
    tab = potential_table(c)
    for (a, b), k in zip(_PAIRS[v.center], v.counts):
        yield k, tab.value(v.center, a, b), tab.angle(v.center, a, b)


def constant_part(v: VertexConfig, c) -> Interval:
    total = Interval.point(0)
    for k, val, _ in _terms(v, c):
        total = total + k * val
    return total


def angle_deficit(v: VertexConfig, c) -> Interval:
    total = TWO_PI
    for k, _, ang in _terms(v, c):
        total = total - k * ang
    return total


def config_margin(v: VertexConfig, m, c) -> Interval:
    slope = Interval.from_fraction(Fraction(m))
    return constant_part(v, c) + slope * abs_iv(angle_deficit(v, c))


def _bound_from(const: Interval, deficit: Interval) -> Optional[Interval]:
    if const.hi >= 0.0 or deficit.contains(0.0):
        return None
    return -const / abs_iv(deficit)


def implied_m_bound(v: VertexConfig, c) -> Optional[Interval]:
    """Smallest slope m for which this configuration's margin is nonnegative.

    ``None`` when the configuration constrains nothing: either the constant
    part is not provably negative or the angle deficit may vanish.
    """
    return _bound_from(constant_part(v, c), angle_deficit(v, c))


def configs(n_max: int = N_MAX) -> Iterator[VertexConfig]:
    for center in (SMALL, LARGE):
        for n in range(3, n_max + 1):
            for a in range(n + 1):
                for b in range(n - a + 1):
                    yield VertexConfig(center, (a, b, n - a - b))


def min_packing_angle(c) -> Interval:
    return c.angle_beta


def degree_bound(c) -> int:
    """Largest vertex degree a saturated Delaunay triangulation allows.

    Every angle satisfies sin(phi) = x / (2R) >= 2r / (2(1+r)) or is obtuse,
    so phi >= asin(r / (1+r)).
    """
    phi_min = asin_iv(c.r / (1 + c.r))
    return math.floor((TWO_PI / phi_min).hi)


def _tail_check(m, c, n_max: int):
    """Margins stay positive for every degree above n_max."""
    tab = potential_table(c)
    slope = Interval.from_fraction(Fraction(m))
    per_term = [tab.base_value[p] + slope * tab.base_angle[p] for p in tab.base_value]
    t_min = min(per_term, key=lambda iv: iv.lo)
    angle_ok = (n_max * min_packing_angle(c)).lo > TWO_PI.hi
    # for n > n_max: sum of angles > 2*pi, so margin >= n * t_min - 2*pi*m
    margin = n_max * t_min - slope * TWO_PI
    return angle_ok and margin.lo > 0.0, t_min, margin


def _cap_check(c):
    """A capped term (0.1) outweighs all other terms of a vertex."""
    tab = potential_table(c)
    worst = min(tab.base_value.values(), key=lambda iv: iv.lo)
    floor_ok = worst.lo >= c.excess_alpha.lo
    n_deg = degree_bound(c)
    slack = c.cap_iv - (n_deg - 1) * abs_iv(c.excess_alpha)
    return floor_ok and slack.lo > 0.0, n_deg, slack


def certify_all(m=Fraction("0.12"), c=None, n_max: int = N_MAX) -> Certificate:
    from .consts import compute_constants

    if c is None:
        c = compute_constants()
    t0 = time.perf_counter()
    checked = 0
    zero_cases: List[str] = []
    failures: List[Tuple[float, VertexConfig, Interval]] = []
    best: Optional[Tuple[Interval, VertexConfig]] = None
    min_pos: Optional[Interval] = None
    slope = Interval.from_fraction(Fraction(m))
    for v in configs(n_max):
        checked += 1
        const = constant_part(v, c)
        deficit = angle_deficit(v, c)
        mg = const + slope * abs_iv(deficit)
        bound = _bound_from(const, deficit)
        if bound is not None and (best is None or bound.hi > best[0].hi):
            best = (bound, v)
        if mg.lo >= 0.0:
            if mg.lo > 0.0 and (min_pos is None or mg.lo < min_pos.lo):
                min_pos = mg
            continue
        if v.key in ZERO_CONFIGS and mg.contains(0.0) and const.contains(0.0):
            zero_cases.append(v.label())
            continue
        failures.append((mg.hi, v, mg))

    tail_ok, t_min, tail_margin = _tail_check(m, c, n_max)
    cap_ok, n_deg, cap_slack = _cap_check(c)
    ok = not failures and tail_ok and cap_ok
    failures.sort(key=lambda f: f[0])
    details = {
        "m": float(Fraction(m)),
        "configs_checked": checked,
        "zero_margin_configs": zero_cases,
        "max_implied_bound": iv_json(best[0]) if best else None,
        "max_implied_bound_at": best[1].label() if best else None,
        "tail_threshold": n_max,
        "tail_margin": iv_json(tail_margin),
        "tail_ok": tail_ok,
        "degree_bound": n_deg,
        "cap_slack": iv_json(cap_slack),
        "cap_ok": cap_ok,
        "failures": [{"config": f[1].label(), "margin": iv_json(f[2])} for f in failures[:20]],
        "failure_count": len(failures),
    }
    return Certificate(
        stage="vertexbal",
        status=PASS if ok else FAIL,
        boxes_processed=checked,
        min_positive_margin=iv_json(min_pos),
        runtime=time.perf_counter() - t0,
        details=details,
    )
