"""Command-line front end: decide points, render rasters, run verification
suites, dump oracle roots, and print geometry reports.

Exit codes: 0 success (for `decide`: In or PresumedIn), 1 Out (or a failed
verification), 2 Unknown, 64 usage error, 70 internal/precondition error.
Commands that write files also write a JSON run manifest next to the first
output, listing the normalized coefficient set, the full parameter record,
and every artifact produced; the manifest is written last.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .coeffset import (CoefficientSet, make_set, span_set, normalize,
                       total_gap, is_symmetric, classify_connectedness,
                       connectivity_graph)
from .recursion import Candidate
from .decide import (SearchConfig, decide_point, witness_real_interval,
                     witness_bounded_greedy, replay_exact_witness,
                     IN, PRESUMED_IN, OUT, UNKNOWN, FIRST_ANY, FIRST_ONE,
                     DEFAULT_DEPTH, DEFAULT_SLACK)
from .oracle import (enumerate_roots, write_roots_csv, family_size,
                     verify_product_inequality, min_modulus_nonreal,
                     cross_check_decide, DEFAULT_BUDGET)
from .geometry import (depth_report, rigidity_scan, quasirigidity_probe,
                       gap3_disconnection_candidate, spike_bands)
from .render import (RasterSpec, Shortcuts, render, write_pgm, read_pgm,
                     diff, set_digest, count_spikes, spike_presence,
                     spike_tips, TIP_RADIUS)
from .errors import AtlasError

EXIT_OK = 0
EXIT_OUT = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_ERROR = 70


# ---------------------------------------------------------------------------
# argument parsing helpers

class _Parser(argparse.ArgumentParser):
    """argparse that exits 64 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def parse_set_spec(text, symmetrize=False, extra=None):
    """Build the working coefficient set from CLI shorthand.

    Accepted forms: "span:M" for {-M..M}, "list:a,b,c" for explicit values,
    "@file.json" for the JSON record {"elements": [...]}.  The set is
    normalized (smallest nonzero magnitude scaled to 1) before use; the
    returned scale records the division applied.
    """
    if text.startswith("span:"):
        s = span_set(int(text[5:]))
    elif text.startswith("list:"):
        s = make_set([float(v) for v in text[5:].split(",") if v != ""])
    elif text.startswith("@"):
        with open(text[1:], "r", encoding="ascii") as fh:
            s = make_set(json.load(fh)["elements"])
    else:
        raise ValueError(f"unrecognized set spec {text!r}")
    if symmetrize:
        s = s.symmetrized()
    if extra:
        for item in extra:
            if item.startswith("drop:"):
                vals = [float(v) for v in item[5:].split(",") if v != ""]
                s = s.without(vals + [-v for v in vals])
            else:
                raise ValueError(f"unrecognized set-extra {item!r}")
    return normalize(s)


def parse_point(text):
    """Candidate from "re,im", "polar:modulus,theta", or "quad:b,c"."""
    if text.startswith("quad:"):
        b, c = (float(v) for v in text[5:].split(","))
        return Candidate.from_quad(b, c)
    if text.startswith("polar:"):
        modulus, theta = (float(v) for v in text[6:].split(","))
        return Candidate.from_polar(modulus, theta)
    re, im = (float(v) for v in text.split(","))
    return Candidate.from_point(re, im)


def parse_size(text):
    w, h = (int(v) for v in text.lower().split("x"))
    if w < 1 or h < 1:
        raise ValueError("size must be positive")
    return w, h


def parse_window(text):
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 4:
        raise ValueError("window needs x0,x1,y0,y1")
    return (vals[0], vals[1]), (vals[2], vals[3])


def resolve_threads(flag_value):
    """Worker count: SIGMA_ATLAS_THREADS wins over --threads, then cores."""
    env = os.environ.get("SIGMA_ATLAS_THREADS")
    if env:
        return max(1, int(env))
    if flag_value:
        return max(1, int(flag_value))
    return os.cpu_count() or 1


def _mode(name):
    return FIRST_ONE if name == "one" else FIRST_ANY


def print_json(payload):
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def set_record(s, scale):
    return {"elements": list(s.elements), "exact_integer": s.exact_integer,
            "scale_applied": scale}


def write_manifest(command, s, scale, config, outputs, wall_time):
    """JSON run record written after every artifact it lists."""
    for path in outputs:
        if not os.path.exists(path):
            raise AtlasError(f"declared output missing: {path}")
    manifest = {"command": command, "set": set_record(s, scale),
                "set_digest": None, "config": config,
                "outputs": list(outputs), "wall_time": wall_time,
                "version": __version__}
    # digest of the set alone (raster digests also bind the raster spec)
    payload = json.dumps({"elements": [repr(float(e)) for e in s.elements],
                          "exact_integer": s.exact_integer}, sort_keys=True)
    manifest["set_digest"] = hashlib.sha256(payload.encode()).hexdigest()
    path = outputs[0] + ".manifest.json" if outputs else None
    if path is not None:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return manifest


# ---------------------------------------------------------------------------
# commands

def cmd_decide(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    cand = parse_point(args.point)
    exact = args.exact or (cand.quad is not None and s.exact_integer
                           and not args.no_exact)
    cfg = SearchConfig(max_depth=args.depth, slack=args.slack,
                       variant=args.variant, first_coeff=_mode(args.mode),
                       exact=exact)
    dec = decide_point(s, cand, cfg)
    payload = dec.to_json_dict()
    payload["point"] = cand.to_json_dict()
    payload["set"] = set_record(s, scale)
    print_json(payload)
    if dec.verdict in (IN, PRESUMED_IN):
        return EXIT_OK
    if dec.verdict == OUT:
        return EXIT_OUT
    return EXIT_UNKNOWN


def cmd_render(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    x_range, y_range = parse_window(args.window)
    w, h = parse_size(args.size)
    cfg = SearchConfig(max_depth=args.depth, slack=args.slack,
                       first_coeff=_mode(args.mode))
    shortcuts = Shortcuts(outer_cutoff=not args.no_shortcuts,
                          certified_annulus=not args.no_shortcuts)
    spec = RasterSpec(x_range=x_range, y_range=y_range, width=w, height=h,
                      cfg=cfg, shortcuts=shortcuts)
    t0 = time.perf_counter()
    raster = render(s, spec, workers=resolve_threads(args.threads))
    write_pgm(raster, args.out)
    outputs = [args.out, args.out + ".json"]
    if args.diff_against:
        other = read_pgm(args.diff_against)
        delta = diff(raster, other)
        base = args.out[:-4] if args.out.endswith(".pgm") else args.out
        diff_path = base + ".diff.pgm"
        write_pgm(delta, diff_path)
        outputs += [diff_path, diff_path + ".json"]
    wall = time.perf_counter() - t0
    write_manifest("render", s, scale, {"spec": spec.to_json_dict(),
                   "threads": resolve_threads(args.threads)},
                   outputs, wall)
    print_json({"out": args.out, "digest": raster.digest,
                "counts": raster.counts()})
    return EXIT_OK


def cmd_oracle(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    mode = _mode(args.mode)
    t0 = time.perf_counter()
    rootset = enumerate_roots(s, args.degree, first_coeff=mode,
                              budget=args.budget)
    write_roots_csv(rootset, args.out)
    wall = time.perf_counter() - t0
    write_manifest("oracle", s, scale,
                   {"degree": args.degree, "mode": args.mode,
                    "budget": args.budget}, [args.out], wall)
    print_json({"out": args.out, "n_polys": rootset.n_polys,
                "n_disc_roots": int(rootset.roots.size),
                "n_root_failures": rootset.n_root_failures})
    return EXIT_OK


def cmd_rho(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    t0 = time.perf_counter()
    report = depth_report(s)
    payload = report.to_json_dict()
    payload["set"] = set_record(s, scale)
    print_json(payload)
    outputs = []
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs = [args.out]
        write_manifest("rho", s, scale, {}, outputs,
                       time.perf_counter() - t0)
    return EXIT_OK


def cmd_rigidity(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = rigidity_scan(s, first_coeff=_mode(args.mode))
    payload = report.to_json_dict()
    payload["set"] = set_record(s, scale)
    print_json(payload)
    return EXIT_OK if report.ok else EXIT_OUT


def cmd_quasirigidity(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = quasirigidity_probe(s, args.k, max_depth=args.depth,
                                 slack=args.slack)
    payload = report.to_json_dict()
    payload["set"] = set_record(s, scale)
    print_json(payload)
    return EXIT_OK if report.agrees else EXIT_OUT


def cmd_gap3(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = gap3_disconnection_candidate(s, max_depth=args.depth,
                                          slack=args.slack)
    payload = report.to_json_dict()
    payload["set"] = set_record(s, scale)
    print_json(payload)
    return EXIT_OK if report.ok else EXIT_OUT


def cmd_spikes(args):
    if args.set:
        s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    else:
        s, scale = span_set(args.M), 1.0
    if args.drop:
        vals = [float(v) for v in args.drop.split(",") if v != ""]
        s = s.without(vals + [-v for v in vals])
    m_abs = int(args.M)
    w, h = parse_size(args.size)
    side = min(1.0, 1.05 / math.sqrt(m_abs))
    x_range, y_range = ((0.0, side), (0.0, side))
    if args.window:
        x_range, y_range = parse_window(args.window)
    cfg = SearchConfig(max_depth=args.depth, slack=args.slack)
    spec = RasterSpec(x_range=x_range, y_range=y_range, width=w, height=h,
                      cfg=cfg)
    t0 = time.perf_counter()
    raster = render(s, spec, workers=resolve_threads(args.threads))
    presence = spike_presence(raster, m_abs, args.tip_radius)
    count = sum(1 for _, p in presence if p)
    wall = time.perf_counter() - t0
    payload = {"count": count,
               "presence": [[k, p] for k, p in presence],
               "band_count": len(spike_bands(m_abs)),
               "tips": [[k, t.real, t.imag] for k, t in spike_tips(m_abs)],
               "set": set_record(s, scale), "digest": raster.digest}
    print_json(payload)
    if args.out:
        write_pgm(raster, args.out)
        write_manifest("spikes", s, scale,
                       {"spec": spec.to_json_dict(), "M": m_abs,
                        "tip_radius": args.tip_radius},
                       [args.out, args.out + ".json"], wall)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verification suites

def _suite_prod_ineq(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = verify_product_inequality(s, args.degree,
                                       first_coeff=_mode(args.mode),
                                       budget=args.budget, tol=args.tol)
    return report.ok, report.to_json_dict()


def _suite_real_strip(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    lo = 1.0 / (s.max_abs + 1.0)
    xs = np.linspace(lo, 0.99, args.count)
    failures = []
    worst = 0.0
    for x in xs:
        dec = witness_real_interval(s, float(x), steps=args.steps)
        q = dec.witness["max_abs_q"]
        worst = max(worst, q)
        if dec.verdict != IN:
            failures.append(float(x))
    detail = {"n_points": int(xs.size), "x_low": float(lo), "x_high": 0.99,
              "steps": args.steps, "max_abs_q": worst,
              "failures": failures}
    return not failures, detail


def _suite_annulus(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    rng = np.random.default_rng(args.seed)
    mod_lo = 1.0 / math.sqrt(s.max_abs)
    failures = []
    cases = []
    for _ in range(args.count):
        mod = rng.uniform(mod_lo, 0.99)
        theta = rng.uniform(1e-3, math.pi / 2.0)
        cand = Candidate.from_polar(mod, theta)
        dec = witness_bounded_greedy(s, cand, steps=args.steps)
        cases.append(dec.verdict)
        if dec.verdict != IN:
            failures.append({"modulus": mod, "theta": theta,
                             "verdict": dec.verdict})
    detail = {"n_points": args.count, "modulus_low": mod_lo,
              "modulus_high": 0.99, "steps": args.steps, "seed": args.seed,
              "failures": failures}
    return not failures, detail


def _suite_rigidity(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = rigidity_scan(s, first_coeff=_mode(args.mode))
    return report.ok, report.to_json_dict()


def _suite_quasirigidity(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = quasirigidity_probe(s, args.k, max_depth=args.depth,
                                 slack=args.slack)
    return report.agrees, report.to_json_dict()


def _suite_gap3(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = gap3_disconnection_candidate(s, max_depth=args.depth,
                                          slack=args.slack)
    return report.ok, report.to_json_dict()


def _suite_conn_class(args):
    s, scale = parse_set_spec(args.set, args.symmetrize, args.set_extra)
    report = classify_connectedness(s)
    graph = connectivity_graph(s)
    detail = {"general": report.general,
              "first_coeff_one": report.first_coeff_one,
              "total_gap": report.total_gap, "max_abs": report.max_abs,
              "graph_connected": graph.connected,
              "graph_edges": [list(e) for e in graph.edges]}
    ok = True
    if args.expect:
        want = args.expect.split(",")
        ok = report.general == want[0]
        if len(want) > 1:
            ok = ok and report.first_coeff_one == want[1]
        detail["expected"] = want
    return ok, detail


_SUITES = {"prod-ineq": _suite_prod_ineq, "real-strip": _suite_real_strip,
           "annulus": _suite_annulus, "rigidity": _suite_rigidity,
           "quasirigidity": _suite_quasirigidity, "gap3": _suite_gap3,
           "conn-class": _suite_conn_class}


def cmd_verify(args):
    t0 = time.perf_counter()
    ok, detail = _SUITES[args.suite](args)
    print_json({"suite": args.suite, "pass": ok, "detail": detail,
                "wall_time": time.perf_counter() - t0})
    return EXIT_OK if ok else EXIT_OUT


# ---------------------------------------------------------------------------
# wiring

def _add_set_flags(p):
    p.add_argument("--set", required=True,
                   help="span:M | list:a,b,c | @file.json")
    p.add_argument("--symmetrize", action="store_true",
                   help="close the set under negation")
    p.add_argument("--set-extra", action="append", default=[],
                   metavar="drop:a,b", help="post-edit, e.g. drop:2 for +-2")


def _add_search_flags(p, depth=DEFAULT_DEPTH):
    p.add_argument("--depth", type=int, default=depth)
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    p.add_argument("--mode", choices=["any", "one"], default="any",
                   help="admissible leading coefficient")


def build_parser():
    top = _Parser(prog="sigma-atlas",
                  description="Root sets of power series with restricted "
                              "coefficients: membership, rasters, reports.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="classify one point")
    _add_set_flags(p)
    _add_search_flags(p)
    p.add_argument("--point", required=True,
                   help="re,im | polar:modulus,theta | quad:b,c")
    p.add_argument("--variant", choices=["auto", "one_step", "two_step"],
                   default="auto")
    p.add_argument("--exact", action="store_true",
                   help="force the integer cycle machine")
    p.add_argument("--no-exact", action="store_true",
                   help="force the float search even for quad points")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("render", help="membership raster to PGM")
    _add_set_flags(p)
    _add_search_flags(p)
    p.add_argument("--size", default="256x256", metavar="WxH")
    p.add_argument("--window", default="-1,1,-1,1", metavar="x0,x1,y0,y1")
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--no-shortcuts", action="store_true",
                   help="disable the outer cutoff and certified annulus")
    p.add_argument("--out", required=True)
    p.add_argument("--diff-against", metavar="FILE.pgm")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle", help="enumerate polynomial roots to CSV")
    _add_set_flags(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--mode", choices=["any", "one"], default="any")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("rho", help="radial depth report")
    _add_set_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("rigidity", help="probe every quadratic anchor root")
    _add_set_flags(p)
    p.add_argument("--mode", choices=["any", "one"], default="any")
    p.set_defaults(func=cmd_rigidity)

    p = sub.add_parser("quasirigidity", help="probe the shifted real point")
    _add_set_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    p.set_defaults(func=cmd_quasirigidity)

    p = sub.add_parser("gap3", help="excluded point inside a width-3 gap")
    _add_set_flags(p)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    p.set_defaults(func=cmd_gap3)

    p = sub.add_parser("spikes", help="render the deep annulus, count spikes")
    p.add_argument("--M", type=int, required=True,
                   help="largest coefficient magnitude")
    p.add_argument("--set", help="override span:M as the working set")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--set-extra", action="append", default=[])
    p.add_argument("--drop", metavar="a,b",
                   help="remove +-a, +-b from the span set")
    p.add_argument("--size", default="384x384", metavar="WxH")
    p.add_argument("--window", metavar="x0,x1,y0,y1")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    p.add_argument("--tip-radius", type=float, default=TIP_RADIUS)
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--out", metavar="FILE.pgm")
    p.set_defaults(func=cmd_spikes)

    p = sub.add_parser("verify", help="run one verification suite")
    p.add_argument("suite", choices=sorted(_SUITES))
    _add_set_flags(p)
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--mode", choices=["any", "one"], default="one")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    p.add_argument("--expect", metavar="GENERAL[,FIRST_ONE]",
                   help="assert the classification")
    p.set_defaults(func=cmd_verify)

    return top


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (AtlasError, ValueError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_ERROR


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
