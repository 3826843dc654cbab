"""Branch and bound proving E - F >= 0 for every feasible Delaunay triangle.

The feasible triangles of each radius family form a box of edge lengths.
Boxes are bisected along their widest edge until each piece is discarded:

* ``local_box``: inside the epsilon-box around a tangent triangle, where
  the derivative bounds of :mod:`discproof.localprove` already apply;
* ``saturation``: no triangle in the box has circumradius <= 1 + r;
* ``infeasible``: no real triangle has these edge lengths;
* ``nonneg_margin``: the interval enclosure of E - F is nonnegative.

:func:`try_discard` is the readable reference; the search itself runs in the
compiled kernel, which reproduces it bit for bit.
"""

from __future__ import annotations

import heapq
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernel as K
from .certificate import FAIL, PASS, Certificate, iv_json
from .ival import Interval
from .localprove import family_anchor
from .potential import _slope_table, potential_table, margin
from .trigeom import (
    LARGE,
    SMALL,
    InfeasibleBox,
    DistanceUndefined,
    TriangleBox,
    others,
    saturation_prune,
)

FAMILIES = ("rrr", "1rr", "r11", "111")
LOCAL_EPSILON = Fraction(1, 1000)

REASONS = {
    K.KEPT: "kept",
    K.NONNEG_MARGIN: "nonneg_margin",
    K.SATURATION: "saturation",
    K.LOCAL_BOX: "local_box",
    K.INFEASIBLE: "infeasible",
}
REASON_CODES = {v: k for k, v in REASONS.items()}

_RADII = {
    "rrr": (SMALL, SMALL, SMALL),
    "1rr": (LARGE, SMALL, SMALL),
    "r11": (SMALL, LARGE, LARGE),
    "111": (LARGE, LARGE, LARGE),
}


@dataclass(frozen=True)
class BoxTask:
    box: TriangleBox
    depth: int = 0


@dataclass
class GlobalConfig:
    max_depth: int = 64
    min_width: float = 1e-6
    threads: int = 1
    log_samples: int = 0
    # root boxes are split this many times before being handed to workers
    task_depth: int = 6
    epsilon: Fraction = LOCAL_EPSILON
    families: Sequence[str] = FAMILIES
    seed: int = 0


# -- boxes -------------------------------------------------------------------

def initial_boxes(c) -> Dict[str, TriangleBox]:
    """One box per family: r_j + r_k <= x_i <= 2(1 + r)."""
    top = (2 * c.one_plus_r).hi
    out = {}
    for fam, radii in _RADII.items():
        edges = []
        for i in range(3):
            j, k = others(i)
            lo = (radii[j].value_iv(c) + radii[k].value_iv(c)).lo
            edges.append(Interval(lo, top))
        out[fam] = TriangleBox(tuple(edges), radii)
    return out


def family_of(t: TriangleBox) -> str:
    for fam, radii in _RADII.items():
        if t.radii == radii:
            return fam
    raise ValueError(f"radius pattern {t.pattern} is not canonical")


def local_faces(fam: str, c, epsilon=LOCAL_EPSILON) -> Tuple[List[float], List[float]]:
    """Lower and upper faces of the family's epsilon-box.

    Edges below the tangency length are infeasible, so the lower face uses
    the lo endpoint of the anchor; the upper face uses the lo endpoint of
    anchor + eps and is therefore conservative.
    """
    x, y = family_anchor(fam, c)
    eps = Interval.from_fraction(Fraction(epsilon))
    lo = [x.lo, y.lo, y.lo]
    hi = [(x + eps).lo, (y + eps).lo, (y + eps).lo]
    return lo, hi


def in_local_box(t: TriangleBox, c, epsilon=LOCAL_EPSILON) -> bool:
    lo, hi = local_faces(family_of(t), c, epsilon)
    return all(lo[i] <= t.edges[i].lo and t.edges[i].hi <= hi[i] for i in range(3))


def canonical(t: TriangleBox) -> TriangleBox:
    """Vertices 1 and 2 carry equal radii in every family; order x1 <= x2."""
    a, b = t.edges[1], t.edges[2]
    if (a.lo, a.hi) > (b.lo, b.hi):
        return t.mirrored()
    return t


def try_discard(t: TriangleBox, c, epsilon=LOCAL_EPSILON) -> Tuple[str, Optional[Interval]]:
    """Reference discard test.  Returns (reason, E - F enclosure or None)."""
    t = canonical(t)
    if in_local_box(t, c, epsilon):
        return "local_box", None
    if saturation_prune(t, c):
        return "saturation", None
    try:
        mg = margin(t, c)
    except InfeasibleBox:
        return "infeasible", None
    except DistanceUndefined:
        return "kept", None
    if mg.lo >= 0.0:
        return "nonneg_margin", mg
    return "kept", mg


# -- kernel parameters -------------------------------------------------------

def pack_family(fam: str, c, epsilon=LOCAL_EPSILON) -> np.ndarray:
    radii = _RADII[fam]
    tab = potential_table(c)
    a = np.zeros(K.FAM_SIZE)
    for i in range(3):
        j, k = others(i)
        base = tab.value(radii[i], radii[j], radii[k])
        ang = tab.angle(radii[i], radii[j], radii[k])
        rsq = radii[i].value_iv(c).sqr()
        a[2 * i:2 * i + 2] = base.lo, base.hi
        a[6 + 2 * i:8 + 2 * i] = ang.lo, ang.hi
        a[12 + 2 * i:14 + 2 * i] = rsq.lo, rsq.hi
        thresholds, slopes = _slope_table(radii[j], radii[k])
        off = 18 + 11 * i
        a[off] = len(thresholds)
        for q, th in enumerate(thresholds):
            iv = Interval.from_fraction(th)
            a[off + 1 + 2 * q:off + 3 + 2 * q] = iv.lo, iv.hi
        for q, s in enumerate(slopes):
            iv = Interval.from_fraction(s)
            a[off + 5 + 2 * q:off + 7 + 2 * q] = iv.lo, iv.hi
    lo, hi = local_faces(fam, c, epsilon)
    a[51:54] = lo
    a[54:57] = hi
    return a


def pack_globals(c) -> np.ndarray:
    rho = c.one_plus_r
    two, four = 2 * rho, 4 * rho
    m, cap = c.m_iv, c.cap_iv
    return np.array([
        c.delta.lo, c.delta.hi, m.lo, m.hi, cap.lo, cap.hi,
        two.lo, two.hi, four.lo, four.hi, c.area_floor.lo,
    ])


def kernel_discard(t: TriangleBox, c, epsilon=LOCAL_EPSILON) -> Tuple[str, float, float]:
    """Evaluate one box with the compiled kernel (for cross-checks)."""
    t = canonical(t)
    fam = pack_family(family_of(t), c, epsilon)
    xl = np.array([x.lo for x in t.edges])
    xh = np.array([x.hi for x in t.edges])
    code, ml, mh = K.evaluate(xl, xh, fam, pack_globals(c))
    return REASONS[code], ml, mh


def probe_violation(bounds, fam: str, c, reach: float = 0.05, n: int = 5) -> Optional[dict]:
    """Look for a point triangle near the box whose E - F is certainly negative.

    Failing boxes usually sit where the margin crosses zero, so besides the
    box's center and corners an ``n``-point grid per edge over the box grown
    by ``reach`` (clipped to the family's initial box) is tried.  Returns the
    point with the most negative certified margin, or None.
    """
    import itertools

    root = initial_boxes(c)[fam]
    radii = "".join(str(t) for t in _RADII[fam])
    pts = [tuple(0.5 * (lo + hi) for lo, hi in bounds)]
    pts += list(itertools.product(*bounds))
    axes = []
    for (lo, hi), e in zip(bounds, root.edges):
        axes.append(np.linspace(max(lo - reach, e.lo), min(hi + reach, e.hi), n))
    pts += [tuple(float(v) for v in p) for p in itertools.product(*axes)]
    # stay on the feasible side of the tangency lengths
    need = []
    for i in range(3):
        j, k = others(i)
        need.append((root.radii[j].value_iv(c) + root.radii[k].value_iv(c)).hi)
    pts = [tuple(max(v, f) for v, f in zip(p, need)) for p in pts]
    best = None
    for p in pts:
        t = TriangleBox.exact(*p, radii=radii)
        try:
            if saturation_prune(t, c) or in_local_box(canonical(t), c):
                continue
            mg = margin(t, c)
        except (InfeasibleBox, DistanceUndefined):
            continue
        if mg.hi < 0.0 and (best is None or mg.hi < best["margin"]["hi"]):
            best = {"point": list(p), "margin": iv_json(mg)}
    return best


# -- search ------------------------------------------------------------------

@dataclass
class _Task:
    family: str
    index: int
    lo: np.ndarray
    hi: np.ndarray
    depth: int


@dataclass
class _Tally:
    counts: np.ndarray = field(default_factory=lambda: np.zeros(K.N_CODES, dtype=np.int64))
    volumes: Dict[str, List[float]] = field(default_factory=dict)
    max_depth: int = 0
    min_pos: Tuple[float, float] = (math.inf, math.inf)

    def add_volume(self, fam: str, code: int, v: float):
        self.volumes.setdefault(fam, [[] for _ in range(K.N_CODES)])[code].append(v)


def _split_arrays(lo, hi):
    w = hi - lo
    k = int(np.argmax(w))  # first maximum, i.e. lowest index on ties
    mid = 0.5 * (lo[k] + hi[k])
    lo_a, hi_a = lo.copy(), hi.copy()
    lo_b, hi_b = lo.copy(), hi.copy()
    hi_a[k] = mid
    lo_b[k] = mid
    return (lo_a, hi_a), (lo_b, hi_b)


def _expand(fam: str, root: TriangleBox, fam_arr, g, cfg: GlobalConfig, tally: _Tally) -> List[_Task]:
    """Split the top levels in breadth-first order and collect subtree tasks."""
    lo = np.array([x.lo for x in root.edges])
    hi = np.array([x.hi for x in root.edges])
    frontier = [(lo, hi)]
    for depth in range(cfg.task_depth):
        nxt = []
        for lo, hi in frontier:
            code, ml, mh = K.evaluate(lo, hi, fam_arr, g)
            tally.counts[code] += 1
            if code != K.KEPT:
                tally.add_volume(fam, code, float(np.prod(hi - lo)))
                if code == K.NONNEG_MARGIN and ml < tally.min_pos[0]:
                    tally.min_pos = (ml, mh)
                continue
            nxt.extend(_split_arrays(lo, hi))
        frontier = nxt
        tally.max_depth = max(tally.max_depth, depth)
    return [_Task(fam, n, lo, hi, cfg.task_depth) for n, (lo, hi) in enumerate(frontier)]


def _run_task(task: _Task, fam_arr, g, cfg: GlobalConfig):
    return K.search(
        task.lo, task.hi, task.depth, fam_arr, g,
        cfg.min_width, cfg.max_depth, cfg.log_samples, cfg.seed + 7919 * task.index,
    )


def _merge_samples(pool, task_samples, n_disc, k_keep, rng, fam):
    """Weighted reservoir merge: each kept sample represents n_disc / len of its task."""
    n = len(task_samples)
    if n == 0 or k_keep == 0:
        return
    w = n_disc / n
    keys = rng.random(n) ** (1.0 / w)
    for key, row in zip(keys, task_samples):
        item = (float(key), fam, row)
        if len(pool) < k_keep:
            heapq.heappush(pool, item)
        elif key > pool[0][0]:
            heapq.heapreplace(pool, item)


def run_global(c=None, cfg: Optional[GlobalConfig] = None, progress=None) -> Certificate:
    """Run the branch and bound on every family.

    Tasks are subtrees below ``cfg.task_depth``; each is searched by the
    compiled kernel, which releases the GIL, so ``cfg.threads`` workers run
    truly in parallel.  Results are merged in task order, so the certificate
    does not depend on scheduling.
    """
    from .consts import compute_constants

    if c is None:
        c = compute_constants()
    cfg = cfg or GlobalConfig()
    t0 = time.perf_counter()
    g = pack_globals(c)
    tally = _Tally()
    roots = initial_boxes(c)
    rng = np.random.default_rng(cfg.seed)
    pool: list = []
    root_volume = {}
    per_family = {}
    failures: Dict[str, dict] = {}

    for fam in cfg.families:
        root = roots[fam]
        root_volume[fam] = math.prod(x.hi - x.lo for x in root.edges)
        fam_arr = pack_family(fam, c, cfg.epsilon)
        before = tally.counts.copy()
        tasks = _expand(fam, root, fam_arr, g, cfg, tally)
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
                results = list(ex.map(lambda tk: _run_task(tk, fam_arr, g, cfg), tasks))
        else:
            results = []
            for tk in tasks:
                results.append(_run_task(tk, fam_arr, g, cfg))
                if results[-1][0] != K.OK:
                    break
        # merge in task order up to the first failing task, so the outcome
        # does not depend on the thread count
        for tk, res in zip(tasks, results):
            status, counts, volumes, deepest, min_pos, fail_box, fail_margin, samples, n_disc = res
            tally.counts += counts
            for code in range(1, K.N_CODES):
                tally.add_volume(fam, code, float(volumes[code]))
            tally.max_depth = max(tally.max_depth, int(deepest))
            if min_pos[0] < tally.min_pos[0]:
                tally.min_pos = (float(min_pos[0]), float(min_pos[1]))
            m = min(n_disc, cfg.log_samples)
            _merge_samples(pool, samples[:m], n_disc, cfg.log_samples, rng, fam)
            if status != K.OK:
                failures[fam] = {
                    "family": fam,
                    "reason": "min_width" if status == K.MIN_WIDTH_FAILURE else "max_depth",
                    "box": [[float(fail_box[q]), float(fail_box[3 + q])] for q in range(3)],
                    "margin": {"lo": float(fail_margin[0]), "hi": float(fail_margin[1])},
                }
                box = failures[fam]["box"]
                failures[fam]["certified_violation"] = probe_violation(box, fam, c)
                break
        per_family[fam] = int((tally.counts - before).sum())
        if progress is not None:
            progress(fam, per_family[fam], time.perf_counter() - t0)

    accounting = {}
    worst_rel = 0.0
    for fam, vols in tally.volumes.items():
        covered = math.fsum(v for code in range(1, K.N_CODES) for v in vols[code])
        rel = abs(covered - root_volume[fam]) / root_volume[fam]
        accounting[fam] = {
            "root_volume": root_volume[fam],
            "discarded_volume": covered,
            "by_reason": {REASONS[code]: math.fsum(vols[code]) for code in range(1, K.N_CODES)},
            "relative_gap": rel,
        }
        accounting[fam]["complete"] = fam not in failures
        if fam not in failures:
            worst_rel = max(worst_rel, rel)

    samples_out = []
    for _, fam, row in sorted(pool, key=lambda it: -it[0]):
        samples_out.append({
            "family": fam,
            "box": [[float(row[q]), float(row[3 + q])] for q in range(3)],
            "reason": REASONS[int(row[6])],
            "margin_lo": None if math.isnan(row[7]) else float(row[7]),
            "margin_hi": None if math.isnan(row[8]) else float(row[8]),
            "depth": int(row[9]),
        })

    counts = tally.counts
    ok = not failures and all(f in per_family for f in cfg.families)
    discards = {REASONS[code]: int(counts[code]) for code in range(1, K.N_CODES)}
    min_pos = None
    if math.isfinite(tally.min_pos[0]):
        min_pos = {"lo": tally.min_pos[0], "hi": tally.min_pos[1]}
    return Certificate(
        stage="globalprove",
        status=PASS if ok else FAIL,
        boxes_processed=int(counts.sum()),
        discards_by_reason=discards,
        max_depth_reached=int(tally.max_depth),
        min_positive_margin=min_pos,
        runtime=time.perf_counter() - t0,
        details={
            "families": list(cfg.families),
            "boxes_by_family": per_family,
            "boxes_split": int(counts[K.KEPT]),
            "epsilon": float(cfg.epsilon),
            "delta": iv_json(c.delta),
            "max_depth": cfg.max_depth,
            "min_width": cfg.min_width,
            "threads": cfg.threads,
            "volume_accounting": accounting,
            "max_relative_volume_gap": worst_rel,
            "counterexample": next(iter(failures.values()), None),
            "failed_families": sorted(failures),
            "counterexamples": failures,
            "area_discard_direction": "box discarded when the area upper bound is below the floor",
            "samples": samples_out,
        },
    )


def default_threads() -> int:
    return os.cpu_count() or 1
