"""Concrete packings, their Delaunay triangulations, and empirical checks.

Plain floating point throughout: nothing here is part of the certified
chain.  It exists to confront the potential with real packings (the compact
patch, triangular lattices, random saturated packings) and to test the
signed-distance property of Delaunay edges that the edge potential relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .trigeom import LARGE, SMALL, DiscRadius, TriangleBox, signed_distance_float

TANGENT_TOL = 1e-9


class DegenerateInput(ValueError):
    """Fewer than three points, or all points collinear."""


@dataclass
class PackingInstance:
    """Disc centers with radius tags inside a rectangular region.

    ``core`` optionally gives a polygon (counter-clockwise vertices); when
    present, the interior triangles are those whose centroid lies in it,
    which removes boundary effects exactly for periodic patches.
    """

    centers: np.ndarray
    tags: List[DiscRadius]
    region: Tuple[float, float, float, float]
    r: float
    core: Optional[np.ndarray] = None

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        if len(self.tags) != len(self.centers):
            raise ValueError("one radius tag per center")

    @property
    def radii(self) -> np.ndarray:
        return np.array([self.r if t is SMALL else 1.0 for t in self.tags])

    def __len__(self) -> int:
        return len(self.centers)

    def min_gap(self) -> float:
        """Smallest center distance minus sum of radii over all pairs."""
        tree = cKDTree(self.centers)
        rad = self.radii
        pairs = tree.query_pairs(2.0 + 1e-6, output_type="ndarray")
        if len(pairs) == 0:
            return math.inf
        d = np.linalg.norm(self.centers[pairs[:, 0]] - self.centers[pairs[:, 1]], axis=1)
        return float(np.min(d - rad[pairs[:, 0]] - rad[pairs[:, 1]]))

    def check_nonoverlap(self, tol: float = TANGENT_TOL) -> None:
        gap = self.min_gap()
        if gap < -tol:
            raise ValueError(f"discs overlap by {-gap}")

    def to_json(self) -> dict:
        return {
            "discs": [
                {"x": float(x), "y": float(y), "r": float(rr)}
                for (x, y), rr in zip(self.centers, self.radii)
            ],
            "region": list(self.region),
        }


@dataclass
class Triangulation:
    points: np.ndarray
    triangles: np.ndarray  # (m, 3), counter-clockwise
    edges: Dict[Tuple[int, int], List[int]] = field(default_factory=dict)
    boundary: np.ndarray = None

    def __post_init__(self):
        if not self.edges:
            for t, (a, b, c) in enumerate(self.triangles):
                for u, v in ((a, b), (b, c), (c, a)):
                    self.edges.setdefault((min(u, v), max(u, v)), []).append(t)
        if self.boundary is None:
            self.boundary = np.zeros(len(self.triangles), dtype=bool)
            for ts in self.edges.values():
                if len(ts) == 1:
                    self.boundary[ts[0]] = True

    def __len__(self) -> int:
        return len(self.triangles)

    def edge_lengths(self, t: int) -> Tuple[float, float, float]:
        """Lengths (x0, x1, x2), x_i opposite vertex i."""
        p = self.points[self.triangles[t]]
        return (
            float(np.linalg.norm(p[1] - p[2])),
            float(np.linalg.norm(p[0] - p[2])),
            float(np.linalg.norm(p[0] - p[1])),
        )

    def circumcircles(self) -> Tuple[np.ndarray, np.ndarray]:
        return _circumcircles(self.points[self.triangles])

    def interior_edges(self):
        for e, ts in self.edges.items():
            if len(ts) == 2:
                yield e, ts[0], ts[1]


def _circumcircles(tri_pts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a, b, c = tri_pts[:, 0], tri_pts[:, 1], tri_pts[:, 2]
    bx, by = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    cx, cy = c[:, 0] - a[:, 0], c[:, 1] - a[:, 1]
    d = 2.0 * (bx * cy - by * cx)
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    with np.errstate(divide="ignore", invalid="ignore"):
        ux = (cy * b2 - by * c2) / d
        uy = (bx * c2 - cx * b2) / d
    centers = np.stack([a[:, 0] + ux, a[:, 1] + uy], axis=1)
    return centers, np.sqrt(ux * ux + uy * uy)


def _orient(p, q, s) -> float:
    return (q[0] - p[0]) * (s[1] - p[1]) - (q[1] - p[1]) * (s[0] - p[0])


def build_delaunay(points, rel_tol: float = 1e-12) -> Triangulation:
    """Bowyer-Watson insertion in lexicographic point order.

    A triangle is replaced only when the new point is strictly inside its
    circumcircle (beyond a relative tolerance), so co-circular ties keep
    the triangle formed by the lexicographically earlier points.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n < 3:
        raise DegenerateInput("need at least three points")
    centered = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-12 * max(1.0, np.abs(centered).max())) < 2:
        raise DegenerateInput("all points are collinear")

    lo, hi = pts.min(axis=0), pts.max(axis=0)
    mid = 0.5 * (lo + hi)
    span = max(hi - lo) + 1.0
    big = 1e3 * span
    sup = np.array([
        [mid[0] - 2 * big, mid[1] - big],
        [mid[0] + 2 * big, mid[1] - big],
        [mid[0], mid[1] + 2 * big],
    ])
    allp = np.vstack([pts, sup])
    order = np.lexsort((pts[:, 1], pts[:, 0]))

    tris = [(n, n + 1, n + 2)]
    cc, rr = _circumcircles(allp[np.array(tris)])
    cc, rr2 = list(cc), list(rr * rr)
    for idx in order:
        p = allp[idx]
        cca = np.asarray(cc)
        d2 = ((cca - p) ** 2).sum(axis=1)
        r2 = np.asarray(rr2)
        bad = np.nonzero(d2 < r2 * (1.0 - rel_tol))[0]
        if len(bad) == 0:
            # numerically on a circle everywhere: fall back to the containing triangle
            bad = np.array([_containing(allp, tris, p)])
        count: Dict[Tuple[int, int], int] = {}
        directed = {}
        for t in bad:
            a, b, c = tris[t]
            for u, v in ((a, b), (b, c), (c, a)):
                key = (min(u, v), max(u, v))
                count[key] = count.get(key, 0) + 1
                directed[key] = (u, v)
        keep = np.ones(len(tris), dtype=bool)
        keep[bad] = False
        tris = [t for t, k in zip(tris, keep) if k]
        cc = [x for x, k in zip(cc, keep) if k]
        rr2 = [x for x, k in zip(rr2, keep) if k]
        new = []
        for key, k in count.items():
            if k == 1:
                u, v = directed[key]
                new.append((u, v, int(idx)))
        if new:
            ncc, nr = _circumcircles(allp[np.array(new)])
            tris.extend(new)
            cc.extend(ncc)
            rr2.extend(nr * nr)

    final = [tuple(int(v) for v in t) for t in tris if max(t) < n]
    # orient counter-clockwise
    final = [t if _orient(pts[t[0]], pts[t[1]], pts[t[2]]) > 0 else (t[0], t[2], t[1]) for t in final]
    final = _complete_hull(pts, final, rel_tol)
    return Triangulation(pts, np.array(final, dtype=np.int64).reshape(-1, 3))


def _complete_hull(pts: np.ndarray, tris: List[Tuple[int, int, int]], rel_tol: float) -> List[Tuple[int, int, int]]:
    """Fill boundary pockets left by the finite super triangle, then flip to Delaunay.

    Nearly flat hull triangles have circumcircles that reach the super
    vertices, so insertion never creates them. Each reflex boundary vertex
    is closed with an ear and Lawson flips restore the empty-circle property.
    """
    scale = float(np.ptp(pts, axis=0).max()) ** 2
    added = False
    while True:
        nxt = {}
        for a, b, c in tris:
            for u, v in ((a, b), (b, c), (c, a)):
                nxt[(u, v)] = True
        boundary = {u: v for (u, v) in nxt if (v, u) not in nxt}
        chain = set(boundary)
        prev = {v: u for u, v in boundary.items()}
        ear = None
        for b in sorted(chain):
            a, c = prev[b], boundary[b]
            if _orient(pts[a], pts[b], pts[c]) >= -1e-14 * scale:
                continue
            if any(_in_triangle(pts, (a, c, b), q) for q in chain if q not in (a, b, c)):
                continue
            ear = (a, c, b)
            break
        if ear is None:
            break
        tris.append(ear)
        added = True
    return _flip_to_delaunay(pts, tris, rel_tol) if added else tris


def _in_triangle(pts, t, q) -> bool:
    a, b, c = (pts[i] for i in t)
    p = pts[q]
    return _orient(a, b, p) >= 0 and _orient(b, c, p) >= 0 and _orient(c, a, p) >= 0


def _flip_to_delaunay(pts, tris, rel_tol):
    tris = [tuple(t) for t in tris]
    while True:
        owner = {}
        for i, (a, b, c) in enumerate(tris):
            for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
                owner[(u, v)] = (i, w)
        flipped = False
        for (u, v), (i, w) in sorted(owner.items()):
            if (v, u) not in owner or u > v:
                continue
            j, x = owner[(v, u)]
            cc, rad = _circumcircles(pts[np.array([tris[i]])])
            if ((pts[x] - cc[0]) ** 2).sum() < rad[0] ** 2 * (1.0 - rel_tol):
                tris[i] = (w, u, x)
                tris[j] = (x, v, w)
                flipped = True
                break
        if not flipped:
            return tris


def _containing(allp, tris, p) -> int:
    best, best_t = -math.inf, 0
    for t, (a, b, c) in enumerate(tris):
        m = min(_orient(allp[a], allp[b], p), _orient(allp[b], allp[c], p), _orient(allp[c], allp[a], p))
        if m > best:
            best, best_t = m, t
    return best_t


def empty_circumcircle_violation(tri: Triangulation, interior_only: bool = True) -> float:
    """Largest amount by which any point lies inside a triangle's circumcircle."""
    cc, rad = tri.circumcircles()
    worst = -math.inf
    tree = cKDTree(tri.points)
    for t in range(len(tri)):
        if interior_only and tri.boundary[t]:
            continue
        near = tree.query_ball_point(cc[t], rad[t] * (1 + 1e-9))
        own = set(tri.triangles[t].tolist())
        for j in near:
            if j in own:
                continue
            worst = max(worst, rad[t] - float(np.linalg.norm(tri.points[j] - cc[t])))
    return max(worst, 0.0) if worst > -math.inf else 0.0


# -- checks on triangulated packings -----------------------------------------

@dataclass
class LemmaReport:
    edges_checked: int
    min_sum: float
    violations: List[Tuple[Tuple[int, int], float]]

    @property
    def passed(self) -> bool:
        return not self.violations


def _opposite_distance(tri: Triangulation, t: int, edge: Tuple[int, int]) -> float:
    a, b, c = tri.triangles[t]
    apex = ({a, b, c} - set(edge)).pop()
    pa, pb, pc = tri.points[apex], tri.points[edge[0]], tri.points[edge[1]]
    x0 = float(np.linalg.norm(pb - pc))
    x1 = float(np.linalg.norm(pa - pc))
    x2 = float(np.linalg.norm(pa - pb))
    return signed_distance_float(x0, x1, x2)


def check_distance_lemma(tri: Triangulation, tol: float = 1e-9) -> LemmaReport:
    """d + d' >= 0 across every edge shared by two triangles."""
    worst = math.inf
    bad = []
    n = 0
    for e, t1, t2 in tri.interior_edges():
        s = _opposite_distance(tri, t1, e) + _opposite_distance(tri, t2, e)
        n += 1
        worst = min(worst, s)
        if s < -tol:
            bad.append((e, s))
    return LemmaReport(n, worst if n else 0.0, bad)


def _point_in_polygon(pt, poly) -> bool:
    inside = False
    x, y = pt
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xi > x:
                inside = not inside
    return inside


def interior_triangles(p: PackingInstance, tri: Triangulation, pad: Optional[float] = None) -> List[int]:
    """Triangles away from the boundary.

    With a ``core`` polygon: triangles whose centroid is in the core.
    Otherwise: triangles with every vertex at least ``pad`` (default
    2(1 + r)) inside the region.
    """
    out = []
    if p.core is not None:
        for t, vs in enumerate(tri.triangles):
            if _point_in_polygon(p.centers[vs].mean(axis=0), p.core):
                out.append(t)
        return out
    pad = 2 * (1 + p.r) if pad is None else pad
    x0, y0, x1, y1 = p.region
    c = p.centers
    ok = (c[:, 0] >= x0 + pad) & (c[:, 0] <= x1 - pad) & (c[:, 1] >= y0 + pad) & (c[:, 1] <= y1 - pad)
    for t, vs in enumerate(tri.triangles):
        if not tri.boundary[t] and ok[vs].all():
            out.append(t)
    return out


def triangle_box(p: PackingInstance, tri: Triangulation, t: int) -> TriangleBox:
    x = tri.edge_lengths(t)
    tags = tuple(p.tags[v] for v in tri.triangles[t])
    return TriangleBox.exact(*x, radii="".join(str(s) for s in tags))


def classify(p: PackingInstance, tri: Triangulation, t: int, tol: float = 1e-6) -> str:
    """alpha, beta, S, L for the four tangent triangles, else other."""
    tags = [p.tags[v] for v in tri.triangles[t]]
    x = tri.edge_lengths(t)
    r = p.r
    n_small = sum(s is SMALL for s in tags)

    def near(vals, target):
        return all(abs(a - b) <= tol for a, b in zip(sorted(vals), sorted(target)))

    if n_small == 3 and near(x, (2 * r,) * 3):
        return "S"
    if n_small == 0 and near(x, (2.0,) * 3):
        return "L"
    if n_small == 1 and near(x, (2.0, 1 + r, 1 + r)):
        return "alpha"
    if n_small == 2 and near(x, (2 * r, 1 + r, 1 + r)):
        return "beta"
    return "other"


@dataclass
class Decomposition:
    sum_E: float
    sum_F: float
    sum_A: float
    sum_D: float
    count: int
    min_margin: float
    negative_margin_count: int

    @property
    def density(self) -> float:
        return self.sum_D / self.sum_A


def _mid(iv) -> float:
    return 0.5 * (iv.lo + iv.hi)


def sum_decomposition(p: PackingInstance, tri: Triangulation, c, triangles: Optional[Sequence[int]] = None) -> Decomposition:
    """Sums of E, F, A and D over the interior triangles."""
    from .potential import coverage_D, excess_E, total_F
    from .trigeom import DistanceUndefined, area

    ts = interior_triangles(p, tri) if triangles is None else list(triangles)
    sE = sF = sA = sD = 0.0
    worst = math.inf
    neg = 0
    for t in ts:
        box = triangle_box(p, tri, t)
        a = _mid(area(box))
        d = _mid(coverage_D(box, c))
        e = _mid(excess_E(box, c))
        try:
            f = _mid(total_F(box, c))
        except DistanceUndefined:
            f = math.nan
        sA += a
        sD += d
        sE += e
        sF += f
        worst = min(worst, e - f)
        neg += e - f < 0
    return Decomposition(sE, sF, sA, sD, len(ts), worst, int(neg))


# -- packings ------------------------------------------------------------------

def _lattice(l: float) -> Tuple[np.ndarray, np.ndarray]:
    """Hexagonal lattice basis: (0, l) and its rotation by -120 degrees."""
    a1 = np.array([0.0, l])
    a2 = l * np.array([math.sqrt(3) / 2, -0.5])
    return a1, a2


def _cell_shape(n_cells: int) -> Tuple[int, int]:
    nx = math.isqrt(n_cells)
    while n_cells % nx:
        nx -= 1
    return nx, n_cells // nx


def compact_cell(r: float) -> Tuple[np.ndarray, List[DiscRadius]]:
    """Disc centers of one unit cell, relative to the cell center.

    The three small discs form a tangent triangle around the center; each
    large disc touches the two small discs of one side of that triangle.
    """
    rho_s = 2 * r / math.sqrt(3)
    rho_l = r / math.sqrt(3) + math.sqrt(1 + 2 * r)
    pts, tags = [], []
    for k in range(3):
        a = math.radians(90 + 120 * k)
        pts.append((rho_s * math.cos(a), rho_s * math.sin(a)))
        tags.append(SMALL)
    for k in range(3):
        a = math.radians(150 + 120 * k)
        pts.append((rho_l * math.cos(a), rho_l * math.sin(a)))
        tags.append(LARGE)
    return np.array(pts), tags


def compact_cell_side(r: float) -> float:
    return 1 + r + math.sqrt(3) * r + math.sqrt(1 + 2 * r)


def build_compact_patch(n_cells: int, c=None, pad: int = 2) -> PackingInstance:
    """Tile the unit cell of the compact packing.

    The core is the parallelogram of ``nx * ny = n_cells`` cells; ``pad``
    extra rings of cells surround it so every core triangle is complete.
    """
    if n_cells < 1:
        raise ValueError("n_cells must be positive")
    r = _r_value(c)
    l = compact_cell_side(r)
    a1, a2 = _lattice(l)
    base, base_tags = compact_cell(r)
    nx, ny = _cell_shape(n_cells)
    pts, tags = [], []
    for i in range(-pad, nx + pad):
        for j in range(-pad, ny + pad):
            off = i * a1 + j * a2
            pts.append(base + off)
            tags.extend(base_tags)
    pts = np.vstack(pts)
    half = -(a1 + a2) / 2
    core = np.array([half, half + nx * a1, half + nx * a1 + ny * a2, half + ny * a2])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return PackingInstance(pts, tags, (lo[0], lo[1], hi[0], hi[1]), r, core=_ccw(core))


def triangular_lattice(n_side: int, r: float, spacing: float = 2.0, tag: DiscRadius = LARGE, pad: int = 2) -> PackingInstance:
    """Hexagonal packing of equal discs with a parallelogram core of n_side² points."""
    a1 = np.array([spacing, 0.0])
    a2 = spacing * np.array([0.5, math.sqrt(3) / 2])
    pts = [i * a1 + j * a2 for i in range(-pad, n_side + pad) for j in range(-pad, n_side + pad)]
    pts = np.array(pts)
    half = -(a1 + a2) / 2
    core = np.array([half, half + n_side * a1, half + n_side * (a1 + a2), half + n_side * a2])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return PackingInstance(pts, [tag] * len(pts), (lo[0], lo[1], hi[0], hi[1]), r, core=_ccw(core))


def _ccw(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    signed = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    return poly if signed > 0 else poly[::-1]


def _r_value(c) -> float:
    if c is None:
        from .consts import compute_constants

        c = compute_constants()
    return 0.5 * (c.r.lo + c.r.hi)


def _fits(tree: cKDTree, radii: np.ndarray, q: np.ndarray, rad: float, k: int = 32) -> np.ndarray:
    """Clearance min_i(|q - c_i| - r_i - rad) per query point (negative: overlap).

    Uses the k nearest centers; a point is recomputed against every disc
    when its k-th neighbour is close enough to matter.
    """
    if len(q) == 0:
        return np.zeros(0)
    k = min(k, tree.n)
    d, idx = tree.query(q, k=k)
    d = d.reshape(len(q), k)
    idx = idx.reshape(len(q), k)
    slack = np.min(d - radii[idx] - rad, axis=1)
    unsure = d[:, -1] - radii.max() - rad < slack
    if k < tree.n and unsure.any():
        for j in np.nonzero(unsure)[0]:
            dd = np.linalg.norm(tree.data - q[j], axis=1)
            slack[j] = np.min(dd - radii - rad)
    return slack


def random_saturated_packing(seed: int, region=(20.0, 20.0), c=None, attempts: int = 1000) -> PackingInstance:
    """Random sequential insertion, then fill every hole that fits a small disc.

    Phase one drops discs of radius r or 1 (equally likely) at random
    positions until ``attempts`` consecutive tries fail.  Phase two adds
    small discs at candidate points (a grid of spacing r/4, then Delaunay
    circumcenters refined by a few ascent steps on the clearance) until no
    candidate fits.  Deterministic for a given seed.
    """
    r = _r_value(c)
    w, h = region
    rng = np.random.default_rng(seed)
    cap = int(4 * w * h / (math.pi * r * r)) + 16
    P = np.empty((cap, 2))
    R = np.empty(cap)
    tags: List[DiscRadius] = []

    def clearance(q, rq):
        n = len(tags)
        if n == 0:
            return math.inf
        d = P[:n] - q
        return float(np.min(np.sqrt(d[:, 0] ** 2 + d[:, 1] ** 2) - R[:n] - rq))

    def push(q, rq, tag):
        n = len(tags)
        P[n] = q
        R[n] = rq
        tags.append(tag)

    fails = 0
    while fails < attempts:
        big = rng.random() < 0.5
        rq = 1.0 if big else r
        q = rng.random(2) * (w, h)
        if clearance(q, rq) >= 0.0:
            push(q, rq, LARGE if big else SMALL)
            fails = 0
        else:
            fails += 1

    def add_small(cands):
        added = 0
        for q in cands:
            if 0 <= q[0] <= w and 0 <= q[1] <= h and clearance(q, r) >= 0.0:
                push(q, r, SMALL)
                added += 1
        return added

    step = r / 4
    gx = np.arange(0.0, w + 1e-12, step)
    gy = np.arange(0.0, h + 1e-12, step)
    grid = np.array([(x, y) for x in gx for y in gy])
    while True:
        n = len(tags)
        slack = _fits(cKDTree(P[:n]), R[:n], grid, r)
        cand = grid[slack >= 0.0]
        if len(cand) == 0:
            break
        cand = cand[rng.permutation(len(cand))]
        if add_small(cand) == 0:
            break

    for _ in range(50):
        n = len(tags)
        tri = build_delaunay(P[:n])
        cc, _ = tri.circumcircles()
        cc = cc[(cc[:, 0] >= 0) & (cc[:, 0] <= w) & (cc[:, 1] >= 0) & (cc[:, 1] <= h)]
        cand = _refine(cc, P[:n].copy(), R[:n].copy(), r, (w, h))
        if add_small(cand) == 0:
            break

    n = len(tags)
    return PackingInstance(P[:n].copy(), tags, (0.0, 0.0, w, h), r)


def _refine(cands: np.ndarray, centers: np.ndarray, radii: np.ndarray, r: float, size, steps: int = 20) -> np.ndarray:
    """Push every candidate away from its most-overlapping disc a few times."""
    if len(cands) == 0:
        return cands
    tree = cKDTree(centers)
    q = cands.copy()
    k = min(16, len(centers))
    for _ in range(steps):
        d, idx = tree.query(q, k=k)
        d = d.reshape(len(q), k)
        idx = idx.reshape(len(q), k)
        s = d - radii[idx] - r
        j = np.argmin(s, axis=1)
        rows = np.arange(len(q))
        worst = s[rows, j]
        move = worst < 0.0
        if not move.any():
            break
        src = centers[idx[rows, j]]
        direction = q - src
        norm = np.linalg.norm(direction, axis=1)
        move &= norm > 0.0
        step = (-worst[move] + 1e-12) / norm[move]
        q[move] = q[move] + direction[move] * step[:, None]
        q = np.clip(q, 0.0, size)
    return q


def saturation_report(p: PackingInstance, tri: Triangulation) -> dict:
    """Largest circumradius among interior triangles, and the saturation bound."""
    cc, rad = tri.circumcircles()
    ts = interior_triangles(p, tri)
    rmax = float(rad[ts].max()) if ts else 0.0
    return {"max_circumradius": rmax, "bound": 1 + p.r, "interior_triangles": len(ts)}


def packing_json(p: PackingInstance, tri: Triangulation) -> dict:
    out = p.to_json()
    out["triangles"] = tri.triangles.tolist()
    out["classes"] = [classify(p, tri, t) for t in range(len(tri))]
    return out
