"""Compiled branch-and-bound over edge-length boxes.

Interval operations here are tuple-valued copies of the :class:`Interval`
methods, written so that a box evaluated by the kernel and by the Python
reference in :mod:`discproof.globalprove` gives bit-identical enclosures.

Parameter layout (float64 arrays built by ``globalprove.pack_family`` and
``globalprove.pack_globals``):

family array
    0:6    vertex base values   (lo, hi) per vertex
    6:12   vertex base angles   (lo, hi) per vertex
    12:18  squared radii        (lo, hi) per vertex
    18:51  edge slope tables, 11 slots per edge:
           n_thresholds, th0 lo/hi, th1 lo/hi, slope0..2 lo/hi
    51:54  local-box lower faces
    54:57  local-box upper faces
globals array
    delta lo/hi, m lo/hi, cap lo/hi, 2(1+r) lo/hi, 4(1+r) lo/hi, area floor lo
"""

import math

import numpy as np
from numba import njit

from ._fp import (
    acos_dn,
    acos_up,
    add_dn,
    add_up,
    div_dn,
    div_up,
    mul_dn,
    mul_up,
    sqrt_dn,
    sqrt_up,
    sub_dn,
    sub_up,
)

KEPT = 0
NONNEG_MARGIN = 1
SATURATION = 2
LOCAL_BOX = 3
INFEASIBLE = 4
N_CODES = 5

# search outcomes
OK = 0
MIN_WIDTH_FAILURE = 1
DEPTH_FAILURE = 2

SAMPLE_COLS = 10  # lo0 lo1 lo2 hi0 hi1 hi2 reason margin_lo margin_hi depth

FAM_SIZE = 57
GLOB_SIZE = 11
_EDGE_BASE = 18
_EDGE_STRIDE = 11

_jit = njit(cache=True, nogil=True)


# -- interval primitives -----------------------------------------------------

@_jit
def _add(al, ah, bl, bh):
    return add_dn(al, bl), add_up(ah, bh)


@_jit
def _sub(al, ah, bl, bh):
    return sub_dn(al, bh), sub_up(ah, bl)


@_jit
def _mul(al, ah, bl, bh):
    if al >= 0.0 and bl >= 0.0:
        return mul_dn(al, bl), mul_up(ah, bh)
    lo = min(mul_dn(al, bl), mul_dn(al, bh), mul_dn(ah, bl), mul_dn(ah, bh))
    hi = max(mul_up(al, bl), mul_up(al, bh), mul_up(ah, bl), mul_up(ah, bh))
    return lo, hi


@_jit
def _div(al, ah, bl, bh):
    # caller guarantees 0 is not in [bl, bh]
    if al >= 0.0 and bl > 0.0:
        return div_dn(al, bh), div_up(ah, bl)
    lo = min(div_dn(al, bl), div_dn(al, bh), div_dn(ah, bl), div_dn(ah, bh))
    hi = max(div_up(al, bl), div_up(al, bh), div_up(ah, bl), div_up(ah, bh))
    return lo, hi


@_jit
def _abs(al, ah):
    if al >= 0.0:
        return al, ah
    if ah <= 0.0:
        return -ah, -al
    return 0.0, max(-al, ah)


@_jit
def _sqr(al, ah):
    l, h = _abs(al, ah)
    return mul_dn(l, l), mul_up(h, h)


# -- triangle geometry -------------------------------------------------------

@_jit
def _others(i):
    if i == 0:
        return 1, 2
    if i == 1:
        return 0, 2
    return 0, 1


@_jit
def _cos(sl, sh, xl, xh, i):
    """Law-of-cosines enclosure for vertex i from squared edges sl/sh."""
    j, k = _others(i)
    nl, nh = _add(sl[j], sh[j], sl[k], sh[k])
    nl, nh = _sub(nl, nh, sl[i], sh[i])
    dl, dh = mul_dn(xl[j], 2.0), mul_up(xh[j], 2.0)
    dl, dh = _mul(dl, dh, xl[k], xh[k])
    return _div(nl, nh, dl, dh)


@_jit
def _cos_point(x, i):
    j, k = _others(i)
    s_i = (mul_dn(x[i], x[i]), mul_up(x[i], x[i]))
    s_j = (mul_dn(x[j], x[j]), mul_up(x[j], x[j]))
    s_k = (mul_dn(x[k], x[k]), mul_up(x[k], x[k]))
    nl, nh = _add(s_j[0], s_j[1], s_k[0], s_k[1])
    nl, nh = _sub(nl, nh, s_i[0], s_i[1])
    dl, dh = mul_dn(x[j], 2.0), mul_up(x[j], 2.0)
    dl, dh = _mul(dl, dh, x[k], x[k])
    return _div(nl, nh, dl, dh)


@_jit
def _area(sl, sh):
    """Area enclosure; returns (ok, lo, hi) with ok False when 16A² < 0."""
    pl, ph = _mul(sl[0], sh[0], sl[1], sh[1])
    ql, qh = _mul(sl[0], sh[0], sl[2], sh[2])
    tl, th = _add(pl, ph, ql, qh)
    ql, qh = _mul(sl[1], sh[1], sl[2], sh[2])
    tl, th = _add(tl, th, ql, qh)
    tl, th = _mul(tl, th, 2.0, 2.0)
    for m in range(3):
        ql, qh = _sqr(sl[m], sh[m])
        tl, th = _sub(tl, th, ql, qh)
    if th < 0.0:
        return False, 0.0, 0.0
    lo = sqrt_dn(max(tl, 0.0))
    hi = sqrt_up(th)
    return True, div_dn(lo, 4.0), div_up(hi, 4.0)


@_jit
def _cos_upper_monotone(sl, sh, xl, xh, i):
    j, k = _others(i)
    corner = np.empty(3)
    corner[i] = xl[i]
    for step in range(2):
        a = j if step == 0 else k
        b = k if step == 0 else j
        gl, gh = _add(sl[a], sh[a], sl[i], sh[i])
        gl, gh = _sub(gl, gh, sl[b], sh[b])
        if gl > 0.0:
            corner[a] = xh[a]
        elif gh < 0.0:
            corner[a] = xl[a]
        else:
            return _cos(sl, sh, xl, xh, i)[1]
    return min(_cos_point(corner, i)[1], _cos(sl, sh, xl, xh, i)[1])


@_jit
def _saturated(sl, sh, xl, xh, g):
    two_rho_lo, two_rho_hi = g[6], g[7]
    four_rho_lo, four_rho_hi = g[8], g[9]
    for i in range(3):
        j, k = _others(i)
        if xl[i] > two_rho_hi:
            return True
        if xl[i] > add_up(xh[j], xh[k]):
            return True
    ok, al, ah = _area(sl, sh)
    if not ok:
        return True
    if ah < g[10]:
        return True
    nl, nh = _mul(xl[0], xh[0], xl[1], xh[1])
    nl, nh = _mul(nl, nh, xl[2], xh[2])
    rl, rh = _div(nl, nh, four_rho_lo, four_rho_hi)
    if ah < rl:
        return True
    for i in range(3):
        ql, qh = _div(xl[i], xl[i], two_rho_lo, two_rho_hi)
        ql, qh = _sqr(ql, qh)
        radl, radh = _sub(1.0, 1.0, ql, qh)
        if radh < 0.0:
            return True
        th = sqrt_up(radh)
        if _cos_upper_monotone(sl, sh, xl, xh, i) < -th:
            return True
    return False


@_jit
def _in_local_box(xl, xh, fam):
    for i in range(3):
        if xl[i] < fam[51 + i] or xh[i] > fam[54 + i]:
            return False
    return True


@_jit
def _edge_needs_distance(x_lo, x_hi, fam, i):
    base = _EDGE_BASE + _EDGE_STRIDE * i
    nth = int(fam[base])
    for k in range(nth + 1):
        lo_ok = k == 0 or x_hi >= fam[base + 1 + 2 * (k - 1)]
        hi_ok = k == nth or x_lo < fam[base + 2 + 2 * k]
        if lo_ok and hi_ok:
            s_lo = fam[base + 5 + 2 * k]
            s_hi = fam[base + 6 + 2 * k]
            if not (s_lo == 0.0 and s_hi == 0.0):
                return True
    return False


@_jit
def _edge_term(x_lo, x_hi, d_lo, d_hi, fam, i):
    base = _EDGE_BASE + _EDGE_STRIDE * i
    nth = int(fam[base])
    first = True
    rl = 0.0
    rh = 0.0
    for k in range(nth + 1):
        lo_ok = k == 0 or x_hi >= fam[base + 1 + 2 * (k - 1)]
        hi_ok = k == nth or x_lo < fam[base + 2 + 2 * k]
        if not (lo_ok and hi_ok):
            continue
        s_lo = fam[base + 5 + 2 * k]
        s_hi = fam[base + 6 + 2 * k]
        if s_lo == 0.0 and s_hi == 0.0:
            vl, vh = 0.0, 0.0
        else:
            vl, vh = _mul(s_lo, s_hi, d_lo, d_hi)
        if first:
            rl, rh = vl, vh
            first = False
        else:
            rl, rh = min(rl, vl), max(rh, vh)
    return rl, rh


@_jit
def evaluate(xl, xh, fam, g):
    """Discard code and E - F enclosure (nan when not evaluated) for one box."""
    nan = math.nan
    # vertices 1 and 2 carry equal radii: order x1 <= x2 so mirrors agree
    if xl[1] > xl[2] or (xl[1] == xl[2] and xh[1] > xh[2]):
        xl = np.array([xl[0], xl[2], xl[1]])
        xh = np.array([xh[0], xh[2], xh[1]])
    if _in_local_box(xl, xh, fam):
        return LOCAL_BOX, nan, nan
    sl = np.empty(3)
    sh = np.empty(3)
    for i in range(3):
        sl[i] = mul_dn(xl[i], xl[i])
        sh[i] = mul_up(xh[i], xh[i])
    if _saturated(sl, sh, xl, xh, g):
        return SATURATION, nan, nan

    ok, al, ah = _area(sl, sh)
    el, eh = _mul(g[0], g[1], al, ah)

    # angles and coverage
    phl = np.empty(3)
    phh = np.empty(3)
    for i in range(3):
        cl, ch = _cos(sl, sh, xl, xh, i)
        cl = max(cl, -1.0)
        ch = min(ch, 1.0)
        if cl > ch:
            return INFEASIBLE, nan, nan
        phl[i] = acos_dn(ch)
        phh[i] = acos_up(cl)
    dl, dh = 0.0, 0.0
    for i in range(3):
        tl, th = _mul(phl[i], phh[i], fam[12 + 2 * i], fam[13 + 2 * i])
        tl, th = div_dn(tl, 2.0), div_up(th, 2.0)
        dl, dh = _add(dl, dh, tl, th)
    el, eh = _sub(el, eh, dl, dh)

    # vertex potentials
    fl, fh = 0.0, 0.0
    for i in range(3):
        ql, qh = _sub(phl[i], phh[i], fam[6 + 2 * i], fam[7 + 2 * i])
        ql, qh = _abs(ql, qh)
        ql, qh = _mul(g[2], g[3], ql, qh)
        ql, qh = _add(fam[2 * i], fam[1 + 2 * i], ql, qh)
        ql, qh = min(ql, g[4]), min(qh, g[5])
        fl, fh = _add(fl, fh, ql, qh)

    # edge potentials
    for i in range(3):
        if not _edge_needs_distance(xl[i], xh[i], fam, i):
            fl, fh = _add(fl, fh, 0.0, 0.0)
            continue
        if al <= 0.0:
            return KEPT, nan, nan
        j, k = _others(i)
        ql, qh = _add(sl[j], sh[j], sl[k], sh[k])
        ql, qh = _sub(ql, qh, sl[i], sh[i])
        ql, qh = _mul(xl[i], xh[i], ql, qh)
        wl, wh = mul_dn(al, 8.0), mul_up(ah, 8.0)
        ql, qh = _div(ql, qh, wl, wh)
        tl, th = _edge_term(xl[i], xh[i], ql, qh, fam, i)
        fl, fh = _add(fl, fh, tl, th)

    ml, mh = _sub(el, eh, fl, fh)
    if ml >= 0.0:
        return NONNEG_MARGIN, ml, mh
    return KEPT, ml, mh


# -- search ------------------------------------------------------------------

@_jit
def _lcg(state):
    # 64-bit LCG; int64 arithmetic wraps in compiled code
    return state * 6364136223846793005 + 1442695040888963407


@_jit
def _volume(xl, xh):
    return (xh[0] - xl[0]) * (xh[1] - xl[1]) * (xh[2] - xl[2])


@_jit
def search(root_lo, root_hi, depth0, fam, g, min_width, max_depth, n_samples, seed):
    """Depth-first search of one subtree.

    Returns (status, counts, volumes, max_depth, min_pos, fail_box,
    fail_margin, samples, n_discards).  ``counts`` and ``volumes`` are
    indexed by discard code; code 0 counts boxes that were split.  The
    search stops at the first undischargeable box.
    """
    stack_lo = np.empty((max_depth + 2, 3))
    stack_hi = np.empty((max_depth + 2, 3))
    stack_d = np.empty(max_depth + 2, dtype=np.int64)
    counts = np.zeros(N_CODES, dtype=np.int64)
    volumes = np.zeros(N_CODES)
    comp = np.zeros(N_CODES)  # Neumaier compensation
    min_pos = np.array([math.inf, math.inf])
    fail_box = np.full(6, math.nan)
    fail_margin = np.full(2, math.nan)
    samples = np.zeros((n_samples, SAMPLE_COLS))
    n_disc = 0
    rng = np.int64(seed) * 2654435761 + 1
    deepest = depth0
    status = OK

    top = 0
    stack_lo[0] = root_lo
    stack_hi[0] = root_hi
    stack_d[0] = depth0
    xl = np.empty(3)
    xh = np.empty(3)
    while top >= 0:
        xl[:] = stack_lo[top]
        xh[:] = stack_hi[top]
        depth = stack_d[top]
        top -= 1
        if depth > deepest:
            deepest = depth
        code, ml, mh = evaluate(xl, xh, fam, g)
        counts[code] += 1
        if code != KEPT:
            v = _volume(xl, xh)
            s = volumes[code] + v
            if abs(volumes[code]) >= v:
                comp[code] += (volumes[code] - s) + v
            else:
                comp[code] += (v - s) + volumes[code]
            volumes[code] = s
            if code == NONNEG_MARGIN and ml < min_pos[0]:
                min_pos[0] = ml
                min_pos[1] = mh
            # reservoir sample of discards
            if n_samples > 0:
                if n_disc < n_samples:
                    slot = n_disc
                else:
                    rng = _lcg(rng)
                    slot = ((rng >> 1) & 0x3FFFFFFFFFFFFFFF) % (n_disc + 1)
                if slot < n_samples:
                    for q in range(3):
                        samples[slot, q] = xl[q]
                        samples[slot, 3 + q] = xh[q]
                    samples[slot, 6] = code
                    samples[slot, 7] = ml
                    samples[slot, 8] = mh
                    samples[slot, 9] = depth
            n_disc += 1
            continue
        # kept: split the widest edge, lowest index on ties
        kk = 0
        wbest = xh[0] - xl[0]
        for q in range(1, 3):
            w = xh[q] - xl[q]
            if w > wbest:
                wbest = w
                kk = q
        if wbest <= min_width:
            status = MIN_WIDTH_FAILURE
        elif depth >= max_depth:
            status = DEPTH_FAILURE
        if status != OK:
            for q in range(3):
                fail_box[q] = xl[q]
                fail_box[3 + q] = xh[q]
            fail_margin[0] = ml
            fail_margin[1] = mh
            counts[KEPT] -= 1
            break
        mid = 0.5 * (xl[kk] + xh[kk])
        # push the upper half first so the lower half is explored first
        top += 1
        stack_lo[top] = xl
        stack_hi[top] = xh
        stack_lo[top, kk] = mid
        stack_d[top] = depth + 1
        top += 1
        stack_lo[top] = xl
        stack_hi[top] = xh
        stack_hi[top, kk] = mid
        stack_d[top] = depth + 1
    for q in range(N_CODES):
        volumes[q] += comp[q]
    return status, counts, volumes, deepest, min_pos, fail_box, fail_margin, samples, n_disc
