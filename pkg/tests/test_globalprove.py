import math
from dataclasses import replace

import numpy as np
import pytest

from discproof.globalprove import (
    FAMILIES,
    GlobalConfig,
    canonical,
    initial_boxes,
    in_local_box,
    kernel_discard,
    probe_violation,
    run_global,
    try_discard,
)
from discproof.ival import Interval
from discproof.potential import margin
from discproof.trigeom import LARGE, SMALL, TriangleBox


def _stable(cert):
    d = cert.to_dict()
    d.pop("runtime")
    return d


def _same(a, b):
    """Tuple equality with NaN equal to itself."""
    return all(x == y or (isinstance(x, float) and math.isnan(x) and math.isnan(y)) for x, y in zip(a, b))


@pytest.fixture(scope="module")
def run_111(c):
    return run_global(c, GlobalConfig(families=("111",)))


@pytest.fixture(scope="module")
def run_all(c):
    return run_global(c, GlobalConfig(log_samples=10_000))


def test_initial_boxes(c):
    boxes = initial_boxes(c)
    assert set(boxes) == set(FAMILIES)
    top = 2 * (1 + c.r.mid)
    assert abs(top - 3.0903) < 1e-4
    rrr = boxes["rrr"]
    assert all(abs(x.lo - 2 * c.r.mid) < 1e-12 and x.hi >= top for x in rrr.edges)
    b = boxes["1rr"]
    assert b.radii == (LARGE, SMALL, SMALL)
    assert abs(b.edges[0].lo - 2 * c.r.mid) < 1e-12 and abs(b.edges[1].lo - (1 + c.r.mid)) < 1e-12
    b = boxes["r11"]
    assert b.edges[0].lo == 2.0 and abs(b.edges[2].lo - (1 + c.r.mid)) < 1e-12
    assert all(x.lo == 2.0 for x in boxes["111"].edges)


def test_discard_examples(c):
    t = TriangleBox.from_bounds([(2, 2.001)] * 3, "111")
    assert try_discard(t, c)[0] == "local_box"
    reason, mg = try_discard(TriangleBox.from_bounds([(2.5, 2.6)] * 3, "rrr"), c)
    assert reason == "nonneg_margin" and mg.lo >= 0
    t = TriangleBox.from_bounds([(3.05, 3.0903), (1.545, 1.56), (1.545, 1.56)], "1rr")
    assert try_discard(t, c)[0] == "saturation"
    t = TriangleBox.from_bounds([(3.0, 3.05), (1.0, 1.01), (1.0, 1.01)], "rrr")
    assert try_discard(t, c)[0] in ("saturation", "infeasible")


def test_local_box_mirror(c):
    r = c.r.mid
    t = TriangleBox.from_bounds([(2 * r + 1e-4, 2 * r + 2e-4), (1 + r + 1e-4, 1 + r + 5e-4), (1 + r + 2e-4, 1 + r + 3e-4)], "1rr")
    assert try_discard(t, c)[0] == "local_box"
    assert try_discard(t.mirrored(), c)[0] == "local_box"
    outside = TriangleBox.from_bounds([(2, 2.0015)] * 3, "111")
    assert not in_local_box(outside, c)


def _random_box(rng, root):
    lo, hi = [], []
    w = 10.0 ** rng.uniform(-6, -0.5)
    for x in root.edges:
        a = rng.uniform(x.lo, x.hi)
        b = min(a + w * (x.hi - x.lo), x.hi)
        lo.append(a)
        hi.append(b)
    return TriangleBox(tuple(Interval(a, b) for a, b in zip(lo, hi)), root.radii)


def test_kernel_matches_reference_bitwise(c):
    rng = np.random.default_rng(1)
    roots = initial_boxes(c)
    seen = set()
    for n in range(4000):
        fam = FAMILIES[n % 4]
        t = _random_box(rng, roots[fam])
        ref_reason, ref_mg = try_discard(t, c)
        k_reason, ml, mh = kernel_discard(t, c)
        assert k_reason == ref_reason, (t, ref_reason, k_reason)
        if ref_mg is not None:
            assert (ml, mh) == (ref_mg.lo, ref_mg.hi)
        seen.add(ref_reason)
    assert {"kept", "nonneg_margin", "saturation"} <= seen


def test_mirror_symmetry(c):
    rng = np.random.default_rng(2)
    roots = initial_boxes(c)
    for n in range(2000):
        fam = FAMILIES[n % 4]
        t = _random_box(rng, roots[fam])
        assert try_discard(t, c) == try_discard(t.mirrored(), c)
        assert _same(kernel_discard(t, c), kernel_discard(t.mirrored(), c))
        assert canonical(t.mirrored()).edges == canonical(t).edges


def test_family_111_passes_with_complete_volume(run_111):
    cert = run_111
    assert cert.passed
    acc = cert.details["volume_accounting"]["111"]
    assert acc["complete"] and acc["relative_gap"] <= 1e-9
    assert cert.boxes_processed == sum(cert.discards_by_reason.values()) + cert.details["boxes_split"]
    assert cert.max_depth_reached <= 64


def test_soundness_audit_of_sampled_discards(c, run_all):
    samples = run_all.details["samples"]
    assert len(samples) == 10_000
    audited = 0
    for s in samples:
        if s["reason"] != "nonneg_margin":
            continue
        mid = [0.5 * (lo + hi) for lo, hi in s["box"]]
        t = TriangleBox.exact(*mid, radii=s["family"])
        width = s["margin_hi"] - s["margin_lo"]
        assert margin(t, c).mid >= -2 * width
        # the point sits inside the box, so its enclosure must overlap the box's
        assert margin(t, c).hi >= s["margin_lo"]
        audited += 1
    assert audited > 1000
    assert {s["family"] for s in samples} == set(FAMILIES)


def test_full_run_reports_per_family(run_all):
    d = run_all.details
    assert set(d["boxes_by_family"]) == set(FAMILIES)
    assert sum(d["boxes_by_family"].values()) == run_all.boxes_processed
    for fam in d["failed_families"]:
        assert not d["volume_accounting"][fam]["complete"]
        assert d["counterexamples"][fam]["family"] == fam


def test_thread_count_does_not_change_result(c):
    cfg = GlobalConfig(families=("111", "rrr"), log_samples=50)
    one = run_global(c, cfg)
    four = run_global(c, replace(cfg, threads=4))
    a, b = _stable(one), _stable(four)
    a["details"].pop("threads")
    b["details"].pop("threads")
    assert a == b


def test_repeat_runs_identical(c):
    cfg = GlobalConfig(families=("111",), log_samples=20)
    assert _stable(run_global(c, cfg)) == _stable(run_global(c, cfg))


def test_lowered_density_gives_counterexample(c):
    low = c.with_delta(c.delta - 0.01)
    cert = run_global(low, GlobalConfig(families=("111",)))
    assert not cert.passed
    ce = cert.details["counterexample"]
    assert ce["family"] == "111" and len(ce["box"]) == 3
    assert ce["margin"]["lo"] < 0
    v = ce["certified_violation"]
    assert v is not None and v["margin"]["hi"] < 0


def test_depth_cap_reports_failure(c):
    cert = run_global(c, GlobalConfig(families=("111",), max_depth=10, task_depth=4))
    assert not cert.passed
    assert cert.details["counterexample"]["reason"] == "max_depth"


def test_probe_finds_certified_violation_for_rrr(c):
    # zero crossing of E - F along the isosceles line x0 = x1 = 2r
    r2 = 2 * c.r.mid
    box = [[r2, r2 + 1e-6], [r2, r2 + 1e-6], [1.2095, 1.2096]]
    v = probe_violation(box, "rrr", c)
    assert v is not None and v["margin"]["hi"] < 0
    t = TriangleBox.exact(*v["point"], radii="rrr")
    assert margin(t, c).hi < 0
