"""Rigorous enclosures of every constant used by the proof.

The radius ratio ``r`` is isolated as a certified root of the degree-8
polynomial, and everything else (density, packing angles, the excesses of
the four tangent triangles, the potential parameters) is derived from that
enclosure.  Nothing here is copied from published decimals; those are only
used as test targets.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from .ival import (
    PI,
    TWO_PI,
    EmptyIntersection,
    Interval,
    acos_iv,
    asin_iv,
    sqrt_iv,
)

# r^8 - 8r^7 - 44r^6 - 232r^5 - 482r^4 - 24r^3 + 388r^2 - 120r + 9
OCTIC = (1, -8, -44, -232, -482, -24, 388, -120, 9)

# physical root bracket; the polynomial has other real roots
R_BRACKET = (0.54, 0.55)

SLOPE_M = Fraction("0.12")
CAP_V = Fraction("0.1")

SQRT3 = sqrt_iv(Interval.point(3.0))


class CertificationError(RuntimeError):
    """An internal certification step that must succeed did not."""


def horner(coeffs: Sequence, x: Interval) -> Interval:
    """Evaluate a polynomial (highest degree first) on an interval."""
    acc = Interval.point(0) + coeffs[0]
    for a in coeffs[1:]:
        acc = acc * x + a
    return acc


def octic(x: Interval) -> Interval:
    return horner(OCTIC, x)


def isolate_r(bracket: Tuple[float, float] = R_BRACKET, tol: float = 1e-12) -> Interval:
    """Bisect the bracket down to an interval with a certified sign change.

    Bisection continues past ``tol`` until the midpoint sign can no longer be
    decided, so the result is usually a few ulps wide.
    """
    lo, hi = bracket
    s_lo = _sign(octic(Interval.point(lo)))
    s_hi = _sign(octic(Interval.point(hi)))
    if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
        raise CertificationError(f"no certified sign change on [{lo}, {hi}]")
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        s_mid = _sign(octic(Interval.point(mid)))
        if s_mid == 0:
            break
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    root = Interval(lo, hi)
    if root.width > tol:
        raise CertificationError(f"root enclosure {root} wider than {tol}")
    return root


def _sign(v: Interval) -> int:
    if v.lo > 0.0:
        return 1
    if v.hi < 0.0:
        return -1
    return 0


def check_quartic(r: Interval) -> Interval:
    """Tangency quartic; it must vanish at the packing radius."""
    s3 = SQRT3
    coeffs = (7 + 4 * s3, 20 + 12 * s3, 6 + 4 * s3, -20 - 4 * s3, Interval.point(3))
    return horner(coeffs, r)


def packing_angles(r: Interval) -> Dict[str, Interval]:
    """alpha, alpha', beta, beta' and pi/3 for the tangent triangles."""
    one_r = 1 + r
    alpha = acos_iv((r.sqr() + 2 * r - 1) / one_r.sqr())
    beta = 2 * asin_iv(r / one_r)
    return {
        "alpha": alpha,
        "alpha_prime": (PI - alpha) / 2,
        "beta": beta,
        "beta_prime": (PI - beta) / 2,
        "pi3": PI / 3,
    }


def cell_side(r: Interval) -> Interval:
    return 1 + r + SQRT3 * r + sqrt_iv(1 + 2 * r)


def density(r: Interval) -> Interval:
    """Density of the compact packing: 3 large + 3 small discs per cell."""
    l = cell_side(r)
    return 2 * SQRT3 * PI * (1 + r.sqr()) / l.sqr()


def excesses(r: Interval, delta: Interval, angles: Dict[str, Interval]) -> Dict[str, Interval]:
    """E = delta*A - D on the four tangent triangles, in closed form."""
    a, ap = angles["alpha"], angles["alpha_prime"]
    b, bp = angles["beta"], angles["beta_prime"]
    r2 = r.sqr()
    # alpha: edges 2, 1+r, 1+r; small disc at the apex
    area_alpha = sqrt_iv((1 + r).sqr() - 1)
    cover_alpha = (a * r2 + 2 * ap) / 2
    # beta: edges 2r, 1+r, 1+r; large disc at the apex
    area_beta = r * sqrt_iv(1 + 2 * r)
    cover_beta = (b + 2 * bp * r2) / 2
    area_small = SQRT3 * r2
    area_large = SQRT3
    cover_small = PI * r2 / 2
    cover_large = PI / 2
    return {
        "alpha": delta * area_alpha - cover_alpha,
        "beta": delta * area_beta - cover_beta,
        "S": delta * area_small - cover_small,
        "L": delta * area_large - cover_large,
    }


def solve_params(e: Dict[str, Interval]) -> Tuple[Interval, Interval]:
    """x = 0 and y from the vertex conditions at the small and large discs.

    The two sides of ``2x E_a - y E_b = 2E_a + 2E_L/3 = -E_b - E_S/3`` are
    both evaluated; their enclosures have to overlap.
    """
    left = 2 * e["alpha"] + Interval.point(2) * e["L"] / 3
    right = -e["beta"] - e["S"] / 3
    if not left.overlaps(right):
        raise CertificationError(f"vertex conditions disagree: {left} vs {right}")
    y = -left / e["beta"]
    return Interval.point(0), y


@dataclass(frozen=True)
class ProofConstants:
    r: Interval
    delta: Interval
    excess_alpha: Interval
    excess_beta: Interval
    excess_S: Interval
    excess_L: Interval
    angle_alpha: Interval
    angle_alpha_prime: Interval
    angle_beta: Interval
    angle_beta_prime: Interval
    angle_pi3: Interval
    param_x: Interval
    param_y: Interval
    cell_side_l: Interval
    area_floor: Interval
    slope_m: Fraction = SLOPE_M
    cap_v: Fraction = CAP_V

    @property
    def m_iv(self) -> Interval:
        return Interval.from_fraction(self.slope_m)

    @property
    def cap_iv(self) -> Interval:
        return Interval.from_fraction(self.cap_v)

    @property
    def one_plus_r(self) -> Interval:
        return 1 + self.r

    def with_delta(self, delta: Interval) -> ProofConstants:
        """Copy with a different target density (sensitivity runs)."""
        return replace(self, delta=delta)

    def intervals(self) -> Dict[str, Interval]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v if isinstance(v, Interval) else Interval.from_fraction(v)
        return out

    def to_json(self) -> list:
        return [{"name": k, "lo": v.lo, "hi": v.hi} for k, v in self.intervals().items()]


def build_constants(r: Interval) -> ProofConstants:
    delta = density(r)
    ang = packing_angles(r)
    exc = excesses(r, delta, ang)
    x, y = solve_params(exc)
    return ProofConstants(
        r=r,
        delta=delta,
        excess_alpha=exc["alpha"],
        excess_beta=exc["beta"],
        excess_S=exc["S"],
        excess_L=exc["L"],
        angle_alpha=ang["alpha"],
        angle_alpha_prime=ang["alpha_prime"],
        angle_beta=ang["beta"],
        angle_beta_prime=ang["beta_prime"],
        angle_pi3=ang["pi3"],
        param_x=x,
        param_y=y,
        cell_side_l=cell_side(r),
        area_floor=2 * r ** 3 / (1 + r),
    )


@functools.lru_cache(maxsize=1)
def compute_constants() -> ProofConstants:
    """The certified constants, computed once per process."""
    return build_constants(isolate_r())


def inflate(iv: Interval, factor: float) -> Interval:
    """Widen an interval about its midpoint (used by robustness checks)."""
    half = 0.5 * factor * max(iv.hi - iv.lo, 0.0)
    return Interval(iv.lo - half, iv.hi + half) if half else iv


def angle_identities(c: ProofConstants) -> Tuple[Interval, Interval]:
    """Angle sums around the small and the large disc minus 2*pi."""
    small = 2 * c.angle_alpha + 2 * c.angle_beta_prime + c.angle_pi3 - TWO_PI
    large = c.angle_beta + 4 * c.angle_alpha_prime + 2 * c.angle_pi3 - TWO_PI
    return small, large


def unit_cell_sum(c: ProofConstants) -> Interval:
    return 6 * c.excess_alpha + 3 * c.excess_beta + c.excess_S + 2 * c.excess_L


__all__ = [
    "CertificationError",
    "EmptyIntersection",
    "ProofConstants",
    "angle_identities",
    "build_constants",
    "cell_side",
    "check_quartic",
    "compute_constants",
    "density",
    "excesses",
    "horner",
    "inflate",
    "isolate_r",
    "octic",
    "packing_angles",
    "solve_params",
    "unit_cell_sum",
]
