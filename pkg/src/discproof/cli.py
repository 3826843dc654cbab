"""Command-line driver: runs the proof stages in order and writes reports.

Exit status is 0 when everything certified, 1 on a certification failure
and 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional

from . import __version__
from .certificate import FAIL, NOT_RUN, PASS, Certificate

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_M = Fraction("0.12")
DEFAULT_EPSILON = Fraction(1, 1000)
STAGES = ("vertexbal", "localprove", "globalprove")


class UsageError(Exception):
    """Configuration the certified run refuses to accept."""


@dataclass
class ProofConfig:
    m: Fraction = DEFAULT_M
    epsilon: Fraction = DEFAULT_EPSILON
    threads: int = 1
    max_depth: int = 64
    min_width: float = 1e-6
    log_samples: int = 0
    skip_global: bool = False
    experimental: bool = False

    def validate(self) -> None:
        if not self.experimental and (self.m != DEFAULT_M or self.epsilon != DEFAULT_EPSILON):
            raise UsageError("non-default m or epsilon requires --experimental")
        if self.threads < 1:
            raise UsageError("--threads must be at least 1")
        if not 1 <= self.max_depth <= 200:
            raise UsageError("--max-depth must lie in [1, 200]")
        if not self.min_width > 0:
            raise UsageError("--min-width must be positive")
        if self.log_samples < 0:
            raise UsageError("--log-samples must be nonnegative")

    def echo(self) -> Dict[str, Any]:
        d = asdict(self)
        d["m"] = str(self.m)
        d["epsilon"] = str(self.epsilon)
        return d


@dataclass
class ProofReport:
    constants: List[Dict[str, Any]]
    stage_certificates: List[Dict[str, Any]]
    overall_status: str
    tool_version: str
    timestamp: str
    config: Dict[str, Any] = field(default_factory=dict)

    def stage(self, name: str) -> Certificate:
        for d in self.stage_certificates:
            if d["stage"] == name:
                return Certificate.from_dict(d)
        raise KeyError(name)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> ProofReport:
        return cls(**json.loads(text))


def _sanitize(obj):
    """Replace non-finite floats by None so reports stay strict JSON."""
    if isinstance(obj, float):
        return obj if obj == obj and abs(obj) != float("inf") else None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _constants(cfg: ProofConfig):
    from .consts import compute_constants

    c = compute_constants()
    if cfg.m != c.slope_m:
        c = replace(c, slope_m=cfg.m)
    return c


def run_full_proof(cfg: Optional[ProofConfig] = None, progress=None) -> ProofReport:
    """constants, then vertex balance, local proof and global proof.

    A failing stage stops the chain; the stages after it are recorded as
    not run.  The global stage discards boxes inside the local boxes, which
    is sound only because the local stage passed first.
    """
    from .globalprove import GlobalConfig, run_global
    from .localprove import certify_local
    from .vertexbal import certify_all

    cfg = cfg or ProofConfig()
    cfg.validate()
    c = _constants(cfg)
    runners = {
        "vertexbal": lambda: certify_all(m=cfg.m, c=c),
        "localprove": lambda: certify_local(epsilon=cfg.epsilon, m=cfg.m, c=c),
        "globalprove": lambda: run_global(c, GlobalConfig(
            max_depth=cfg.max_depth,
            min_width=cfg.min_width,
            threads=cfg.threads,
            log_samples=cfg.log_samples,
            epsilon=cfg.epsilon,
        )),
    }
    certs: List[Certificate] = []
    blocked = None
    for name in STAGES:
        if blocked is not None:
            certs.append(Certificate(stage=name, details={"skipped_because": f"{blocked} failed"}))
            continue
        if name == "globalprove" and cfg.skip_global:
            certs.append(Certificate(stage=name, details={"skipped_because": "--skip-global"}))
            continue
        cert = runners[name]()
        if name != "vertexbal":
            cert.details["requires"] = STAGES[STAGES.index(name) - 1]
        certs.append(cert)
        if progress is not None:
            progress(cert)
        if not cert.passed:
            blocked = name
    overall = PASS if all(cert.passed for cert in certs) else FAIL
    return ProofReport(
        constants=c.to_json(),
        stage_certificates=[_sanitize(cert.to_dict()) for cert in certs],
        overall_status=overall,
        tool_version=__version__,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(),
        config=cfg.echo(),
    )


# -- argument handling -----------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _region(text: str):
    try:
        w, h = (float(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"region must look like 20x20, got {text!r}")
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("region sides must be positive")
    return w, h


def build_parser() -> argparse.ArgumentParser:
    def global_flags(p, suppress):
        # subcommand copies must not overwrite values given before the subcommand
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        p.add_argument("--report", metavar="PATH", default=dflt(None), help="write the JSON result to PATH")
        p.add_argument("--threads", type=int, default=dflt(1), help="worker threads for the global search")
        p.add_argument("--json", action="store_true", default=dflt(False), help="machine-readable output on stdout")
        p.add_argument("--experimental", action="store_true", default=dflt(False),
                       help="allow non-default m and epsilon")

    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, suppress=True)

    parser = argparse.ArgumentParser(
        prog="discproof",
        description="Certify the density bound for compact packings of discs of radius 1 and r.",
    )
    global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common], help="print the certified constant enclosures")

    p = sub.add_parser("verify-vertex", parents=[common], help="vertex balance enumeration")
    p.add_argument("--m", type=_fraction, default=DEFAULT_M)

    p = sub.add_parser("verify-local", parents=[common], help="derivative bounds near tangent triangles")
    p.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    p.add_argument("--m", type=_fraction, default=DEFAULT_M)

    def search_opts(p):
        p.add_argument("--max-depth", type=int, default=64)
        p.add_argument("--min-width", type=float, default=1e-6)
        p.add_argument("--log-samples", type=int, default=0, metavar="K",
                       help="keep K uniformly sampled discards")

    p = sub.add_parser("verify-global", parents=[common], help="interval branch and bound")
    search_opts(p)
    p.add_argument("--log", metavar="PATH", help="write sampled discards as line-delimited JSON")

    p = sub.add_parser("prove", parents=[common], help="run every stage in order")
    search_opts(p)
    p.add_argument("--m", type=_fraction, default=DEFAULT_M)
    p.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    p.add_argument("--skip-global", action="store_true")

    p = sub.add_parser("emit-packing", parents=[common], help="write a compact patch as JSON")
    p.add_argument("--cells", type=int, default=16)
    p.add_argument("--out", required=True)

    p = sub.add_parser("empirical", parents=[common], help="checks on a random saturated packing")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--region", type=_region, default=(20.0, 20.0), metavar="WxH")
    return parser


def _emit(args, payload: Dict[str, Any], summary: str) -> None:
    text = json.dumps(_sanitize(payload), indent=2)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    print(text if args.json else summary)


def _status_exit(status: str) -> int:
    return EXIT_PASS if status == PASS else EXIT_FAIL


def _check_experimental(args) -> None:
    m = getattr(args, "m", DEFAULT_M)
    eps = getattr(args, "epsilon", DEFAULT_EPSILON)
    if not args.experimental and (m != DEFAULT_M or eps != DEFAULT_EPSILON):
        raise UsageError("non-default m or epsilon requires --experimental")


def _cmd_constants(args) -> int:
    from .consts import compute_constants

    rows = compute_constants().to_json()
    # 17 significant digits round-trip a double exactly
    rows = [{"name": d["name"], "lo": float(f"{d['lo']:.17g}"), "hi": float(f"{d['hi']:.17g}")} for d in rows]
    text = "\n".join(f"{d['name']:>18}  [{d['lo']:.17g}, {d['hi']:.17g}]" for d in rows)
    _emit(args, {"constants": rows}, text)
    return EXIT_PASS


def _cmd_vertex(args) -> int:
    from .vertexbal import certify_all

    _check_experimental(args)
    cert = certify_all(m=args.m, c=_constants(ProofConfig(m=args.m, experimental=True)))
    d = cert.details
    payload = {
        "configs_checked": d["configs_checked"],
        "zero_margin_configs": d["zero_margin_configs"],
        "max_implied_bound": d["max_implied_bound"],
        "max_implied_bound_at": d["max_implied_bound_at"],
        "tail_threshold": d["tail_threshold"],
        "status": cert.status,
        "certificate": cert.to_dict(),
    }
    _emit(args, payload, f"vertexbal: {cert.status} ({d['configs_checked']} configurations, "
                         f"max implied m bound {d['max_implied_bound']['hi']:.9f})")
    return _status_exit(cert.status)


def _cmd_local(args) -> int:
    from .localprove import certify_local

    _check_experimental(args)
    cert = certify_local(epsilon=args.epsilon, m=args.m, c=_constants(ProofConfig(m=args.m, experimental=True)))
    th = cert.details["thresholds"]
    payload = {"thresholds": th, "status": cert.status, "certificate": cert.to_dict()}
    lines = [f"localprove: {cert.status}"]
    lines += [f"  {k:>8} in [{v['lo']:.9f}, {v['hi']:.9f}]" for k, v in th.items()]
    lines += [f"  problem: {msg}" for msg in cert.details["problems"]]
    _emit(args, payload, "\n".join(lines))
    return _status_exit(cert.status)


def _global_summary(cert: Certificate) -> str:
    d = cert.details
    lines = [
        f"globalprove: {cert.status}",
        f"  boxes processed {cert.boxes_processed}, max depth {cert.max_depth_reached}, {cert.runtime:.1f} s",
        f"  discards {cert.discards_by_reason}",
    ]
    for fam, ce in d.get("counterexamples", {}).items():
        lines.append(f"  {fam}: unresolved box {ce['box']}")
        if ce.get("certified_violation"):
            v = ce["certified_violation"]
            lines.append(f"  {fam}: E - F in [{v['margin']['lo']:.3g}, {v['margin']['hi']:.3g}] at {v['point']}")
    return "\n".join(lines)


def _cmd_global(args) -> int:
    from .globalprove import GlobalConfig, run_global

    cfg = ProofConfig(threads=args.threads, max_depth=args.max_depth,
                      min_width=args.min_width, log_samples=args.log_samples)
    cfg.validate()
    cert = run_global(_constants(cfg), GlobalConfig(
        max_depth=cfg.max_depth, min_width=cfg.min_width,
        threads=cfg.threads, log_samples=cfg.log_samples,
    ))
    if args.log:
        with open(args.log, "w") as fh:
            for s in cert.details["samples"]:
                fh.write(json.dumps(_sanitize({"box": s["box"], "reason": s["reason"],
                                               "margin_lo": s["margin_lo"]})) + "\n")
    _emit(args, cert.to_dict(), _global_summary(cert))
    return _status_exit(cert.status)


def _cmd_prove(args) -> int:
    cfg = ProofConfig(
        m=args.m, epsilon=args.epsilon, threads=args.threads,
        max_depth=args.max_depth, min_width=args.min_width,
        log_samples=args.log_samples, skip_global=args.skip_global,
        experimental=args.experimental,
    )
    report = run_full_proof(cfg)
    text = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        for d in report.stage_certificates:
            print(f"{d['stage']:>12}: {d['status']}")
        print(f"{'overall':>12}: {report.overall_status}")
    return _status_exit(report.overall_status)


def _cmd_emit(args) -> int:
    from .delaunay import build_compact_patch, build_delaunay, packing_json

    if args.cells < 1:
        raise UsageError("--cells must be positive")
    p = build_compact_patch(args.cells)
    tri = build_delaunay(p.centers)
    data = packing_json(p, tri)
    with open(args.out, "w") as fh:
        json.dump(data, fh)
    summary = f"wrote {len(p)} discs and {len(tri)} triangles to {args.out}"
    if args.json:
        print(json.dumps({"out": args.out, "discs": len(p), "triangles": len(tri)}))
    else:
        print(summary)
    return EXIT_PASS


def _cmd_empirical(args) -> int:
    from .consts import compute_constants
    from .delaunay import (
        build_delaunay,
        check_distance_lemma,
        random_saturated_packing,
        saturation_report,
        sum_decomposition,
    )

    c = compute_constants()
    p = random_saturated_packing(args.seed, args.region, c)
    tri = build_delaunay(p.centers)
    lemma = check_distance_lemma(tri)
    dec = sum_decomposition(p, tri, c)
    sat = saturation_report(p, tri)
    ok = lemma.passed and dec.density <= c.delta.hi + 1e-3
    payload = {
        "seed": args.seed,
        "region": list(args.region),
        "discs": len(p),
        "distance_lemma": {"edges_checked": lemma.edges_checked, "min_sum": lemma.min_sum,
                           "violations": len(lemma.violations), "passed": lemma.passed},
        "saturation": sat,
        "decomposition": asdict(dec) | {"density": dec.density},
        "delta": c.delta.hi,
        "status": PASS if ok else FAIL,
    }
    _emit(args, payload, f"empirical seed {args.seed}: {len(p)} discs, density {dec.density:.6f}, "
                         f"lemma {'ok' if lemma.passed else 'violated'}, "
                         f"{dec.negative_margin_count}/{dec.count} triangles with E - F < 0")
    return _status_exit(payload["status"])


COMMANDS = {
    "constants": _cmd_constants,
    "verify-vertex": _cmd_vertex,
    "verify-local": _cmd_local,
    "verify-global": _cmd_global,
    "prove": _cmd_prove,
    "emit-packing": _cmd_emit,
    "empirical": _cmd_empirical,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"discproof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
