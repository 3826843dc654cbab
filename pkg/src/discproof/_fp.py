"""Directed-rounding scalar primitives.

Each ``*_dn`` / ``*_up`` function returns a double that is a guaranteed lower
/ upper bound of the exact real result of the operation on its double
arguments.  The hardware rounding mode is never touched: the result is
computed in round-to-nearest, the sign of the rounding error is recovered
with an error-free transformation, and the endpoint is moved one ulp outward
only when the error points the wrong way.  Exact results stay exact, so
``add([1,2],[3,4])`` is exactly ``[4,6]``.

When an error-free transformation is not valid (overflow, results near the
underflow threshold, non-finite operands) the endpoint is nudged one ulp
outward unconditionally, which is always sound under round-to-nearest.

Everything here is compiled with numba so the same code serves the
:class:`~discproof.ival.Interval` class and the branch-and-bound kernel.
"""

import math

from numba import njit

INF = math.inf

# Dekker splitting constant 2**27 + 1.
_SPLIT = 134217729.0
# Below this magnitude the product error term may underflow; above the split
# constant overflows.  Both fall back to an unconditional nudge.
_TINY = 1e-280
_HUGE = 1e290
# s*s must stay inside the safe product range
_SQRT_TINY = 1e-135
_SQRT_HUGE = 1e140

_jit = njit(cache=True, nogil=True)


@_jit
def next_dn(x):
    return math.nextafter(x, -INF)


@_jit
def next_up(x):
    return math.nextafter(x, INF)


@_jit
def _two_sum_err(a, b, s):
    bb = s - a
    return (a - (s - bb)) + (b - bb)


@_jit
def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


@_jit
def _two_prod_err(a, b, p):
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


@_jit
def _prod_safe(a, b, p):
    ap = abs(p)
    return (
        math.isfinite(p)
        and ap > _TINY
        and _TINY < abs(a) < _HUGE
        and _TINY < abs(b) < _HUGE
    )


@_jit
def add_dn(a, b):
    s = a + b
    if not math.isfinite(s):
        return next_dn(s) if s > 0 else s
    if _two_sum_err(a, b, s) < 0.0:
        return next_dn(s)
    return s


@_jit
def add_up(a, b):
    s = a + b
    if not math.isfinite(s):
        return next_up(s) if s < 0 else s
    if _two_sum_err(a, b, s) > 0.0:
        return next_up(s)
    return s


@_jit
def sub_dn(a, b):
    return add_dn(a, -b)


@_jit
def sub_up(a, b):
    return add_up(a, -b)


@_jit
def mul_dn(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isnan(p):
        return -INF
    if not _prod_safe(a, b, p):
        # keep the known sign when the nudge would cross zero
        v = next_dn(p)
        return 0.0 if v < 0.0 and (a > 0.0) == (b > 0.0) else v
    if _two_prod_err(a, b, p) < 0.0:
        return next_dn(p)
    return p


@_jit
def mul_up(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isnan(p):
        return INF
    if not _prod_safe(a, b, p):
        v = next_up(p)
        return 0.0 if v > 0.0 and (a > 0.0) != (b > 0.0) else v
    if _two_prod_err(a, b, p) > 0.0:
        return next_up(p)
    return p


@_jit
def _div_residual_sign(a, b, q):
    # sign of a - q*b, evaluated exactly: q*b = p + e with p close to a
    p = q * b
    e = _two_prod_err(q, b, p)
    res = (a - p) - e
    if res > 0.0:
        return 1
    if res < 0.0:
        return -1
    return 0


@_jit
def _div_safe(a, b, q):
    return (
        math.isfinite(q)
        and abs(q) > _TINY
        and abs(q) < _HUGE
        and _TINY < abs(b) < _HUGE
        and _TINY < abs(a) < _HUGE
    )


@_jit
def div_dn(a, b):
    """Lower bound of a / b; b must be nonzero."""
    if a == 0.0:
        return 0.0
    q = a / b
    if not _div_safe(a, b, q):
        v = next_dn(q)
        return 0.0 if v < 0.0 and (a > 0.0) == (b > 0.0) else v
    sgn = _div_residual_sign(a, b, q)
    # a/b - q has the sign of (a - q*b) * sign(b)
    if b < 0.0:
        sgn = -sgn
    if sgn < 0:
        return next_dn(q)
    return q


@_jit
def div_up(a, b):
    if a == 0.0:
        return 0.0
    q = a / b
    if not _div_safe(a, b, q):
        v = next_up(q)
        return 0.0 if v > 0.0 and (a > 0.0) != (b > 0.0) else v
    sgn = _div_residual_sign(a, b, q)
    if b < 0.0:
        sgn = -sgn
    if sgn > 0:
        return next_up(q)
    return q


@_jit
def _sqrt_residual_sign(x, s):
    p = s * s
    e = _two_prod_err(s, s, p)
    res = (x - p) - e
    if res > 0.0:
        return 1
    if res < 0.0:
        return -1
    return 0


@_jit
def sqrt_dn(x):
    if x <= 0.0:
        return 0.0
    s = math.sqrt(x)
    if not (_SQRT_TINY < s < _SQRT_HUGE):
        return next_dn(s)
    if _sqrt_residual_sign(x, s) < 0:
        return next_dn(s)
    return s


@_jit
def sqrt_up(x):
    if x <= 0.0:
        return 0.0
    s = math.sqrt(x)
    if not (_SQRT_TINY < s < _SQRT_HUGE):
        return next_up(s)
    if _sqrt_residual_sign(x, s) > 0:
        return next_up(s)
    return s


# pi is 3.14159265358979311599... as a double (below the true value)
PI_LO = 3.141592653589793
PI_HI = math.nextafter(PI_LO, INF)


@_jit
def acos_dn(x):
    """Lower bound of arccos(x) for x in [-1, 1]."""
    if x >= 1.0:
        return 0.0
    v = math.acos(x)
    v = next_dn(next_dn(v))
    return v if v > 0.0 else 0.0


@_jit
def acos_up(x):
    if x <= -1.0:
        return PI_HI
    v = math.acos(x)
    v = next_up(next_up(v))
    return v if v < PI_HI else PI_HI
