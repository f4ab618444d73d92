"""Command-line surface: orbits, angle synthesis, coverage histograms,
spiral figures, segment/quad fills, reach certificates, and verification.

All output is deterministic given the flags (and the seed, where randomness
is involved).  Exit codes: 0 success, 1 verification failure or exhausted
reach budget, 2 usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import derivation as deriv
from . import dynamics, fill, spiral, svgfig
from .geometry import Point, Triangle


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r} ({exc})")


def _parse_point(text: str) -> Point:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"point must be 'x,y', got {text!r}")
    try:
        return Point(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad coordinate in {text!r}: {exc}")


def _write(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_orbit(args: argparse.Namespace) -> int:
    a = dynamics.RationalAngle(args.alpha)
    report = dynamics.orbit(a, args.steps)
    print(f"alpha/pi = {args.alpha}")
    print(f"{'j':>4}  {'alpha_j/pi':<16}  x_j")
    cur = args.alpha
    for j, pt in enumerate(report.points, start=1):
        print(f"{j:>4}  {str(cur):<16}  {float(pt.x):.12g}")
        cur = cur * 2 % 1
    if report.kind == "eventually_periodic":
        print(f"eventually periodic: preperiod {report.preperiod}, "
              f"period {report.period}")
    elif report.kind == "terminates":
        if report.step and report.step > 1:
            print(f"terminates at step {report.step} "
                  f"(Q{report.step - 1} at origin)")
        else:
            print(f"terminates at step {report.step} (Q1 undefined)")
    else:
        print(f"undetermined after horizon {report.horizon}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    a = dynamics.synthesize_alpha(args.preperiod, args.period)
    report = dynamics.orbit(a, 1)
    print(f"alpha/pi = {a.fraction}")
    print(f"orbit: preperiod {report.preperiod}, period {report.period}")
    return 0


def _cmd_tm(args: argparse.Namespace) -> int:
    a = dynamics.thue_morse(args.bits)
    grouped = " ".join(a.bits[i:i + 8] for i in range(0, len(a.bits), 8))
    print(f"bits ({args.bits}): {grouped}")
    if args.steps:
        report = dynamics.orbit(a, args.steps)
        worst = max(abs(float(p.x)) for p in report.points)
        bound = 1 + math.sqrt(2)
        print(f"orbit points computed: {len(report.points)}")
        print(f"max |x| over {len(report.points)} steps: {worst:.12g} "
              f"(bound 1+sqrt(2) = {bound:.12g})")
    return 0


def _cmd_coverage(args: argparse.Namespace) -> int:
    report = dynamics.coverage_experiment(args.samples, args.steps,
                                          args.bins, args.seed)
    hits = sum(report.counts)
    print(f"samples {report.samples}, steps {report.steps}, bins {report.bins}, "
          f"seed {report.rng_seed}")
    print(f"hits: {hits}")
    print(f"empty-bin fraction: {report.empty_fraction:.6f}")
    _write(args.svg, svgfig.coverage_figure(report)) if args.svg else None
    return 0


def _cmd_spiral(args: argparse.Namespace) -> int:
    if args.beta is not None:
        beta = float(args.beta) * math.pi
        x = dynamics.cotpi(float(args.beta) / 2)
    else:
        x = float(args.x)
        if x == 0:
            print("error: ZeroApex: apex on the base line", file=sys.stderr)
            return 1
        beta = None
    p1, p2, p3 = Point(0.0, -1.0), Point(0.0, 1.0), Point(x, 0.0)
    state = spiral.spiral_orbit(p1, p2, p3, args.count)
    print(f"start apex: ({x:.12g}, 0)")
    print(f"vertex angle beta = {state.beta:.12g} rad"
          + (f" ({args.beta} pi)" if beta is not None else ""))
    print(f"lambda = {state.lam:.12g}")
    print(f"p_infinity = ({float(state.p_infinity.x):.12g}, "
          f"{float(state.p_infinity.y):.12g})")
    if len(state.points) >= 12:
        report = spiral.orderly_queues_check(state, args.tol)
        worst_line = max(line.residual for line in report.lines)
        print(f"queue line residual (max): {worst_line:.3e}")
        print(f"queue perpendicularity |cos|: {report.perp_13:.3e} "
              f"{report.perp_24:.3e}")
        print(f"queues {'pass' if report.ok else 'FAIL'} at tol {args.tol:g}")
    if args.svg:
        _write(args.svg, svgfig.spiral_figure(state))
    return 0


def _canonical_segment_cloud(depth: int, width: Optional[int],
                             ratio: Fraction) -> fill.FillCloud:
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    w = width if width is not None else max(3 * depth, 1)
    base = [Point(ratio ** k, Fraction(0)) for k in range(1, w + 1)]
    return fill.segment_fill(Point(0, 0), Point(0, 1), base, depth, width=w)


def _cmd_fill(args: argparse.Namespace) -> int:
    cloud = _canonical_segment_cloud(args.depth, args.width, args.ratio)
    patch = None
    if args.mode == "segment":
        print(f"segment cloud: {len(cloud.points)} points, depth {args.depth}")
        print(f"resolution (segment units): {cloud.resolution:.6g}")
        result = cloud
    else:
        apex = Point(0.6, 0.5)
        if args.patch:
            a, b, c, d = (float(v) for v in args.patch.split(","))
            patch = fill.QuadPatch(a, b, c, d)
        else:
            f_q = fill._quad_frame(apex, cloud)
            inv_q = f_q.inverse()
            us = sorted(float(inv_q(p).x) for p in cloud.points)
            span = us[-1] - us[0]
            patch = fill.QuadPatch(us[0] + 0.08 * span, us[0] + 0.36 * span,
                                   us[0] + 0.60 * span, us[0] + 0.92 * span)
        result = fill.quad_fill(apex, cloud, patch, args.grid)
        print(f"quad cloud: {len(result.points)} points, grid {args.grid}")
        print(f"patch: a={float(patch.a):.6g} b={float(patch.b):.6g} "
              f"c={float(patch.c):.6g} d={float(patch.d):.6g}")
        print(f"covering radius (patch units): {result.resolution:.6g}")
    report = deriv.verify(result.derivation)
    print(f"derivation: {len(result.derivation)} steps, "
          f"verify {'pass' if report.ok else 'FAIL'}")
    if args.out:
        _write(args.out, deriv.serialize(result.derivation))
        print(f"wrote {args.out}")
    if args.svg:
        _write(args.svg, svgfig.fill_figure(result if args.mode == 'segment' else cloud,
                                            patch))
    return 0 if report.ok else 1


def _cmd_reach(args: argparse.Namespace) -> int:
    seed = Triangle(args.seed[0], args.seed[1], args.seed[2])
    try:
        d = fill.reach(args.target, seed, args.epsilon)
    except fill.BudgetExceeded as exc:
        print(f"error: BudgetExceeded: {exc}", file=sys.stderr)
        return 1
    final = d.last_point()
    err = final.dist(args.target)
    report = deriv.verify(d)
    print(f"target: ({float(args.target.x):.12g}, {float(args.target.y):.12g})")
    print(f"final point: ({float(final.x):.12g}, {float(final.y):.12g})")
    print(f"error: {err:.6e} (epsilon {args.epsilon:g})")
    print(f"derivation: {len(d)} steps, verify {'pass' if report.ok else 'FAIL'}")
    if args.out:
        _write(args.out, deriv.serialize(d))
        print(f"wrote {args.out}")
    return 0 if report.ok and err <= args.epsilon else 1


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            d = deriv.parse(fh.read())
    except OSError as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return 1
    report = deriv.verify(d, args.tol)
    if report.ok:
        print(f"PASS: {report.steps_checked} center steps verified "
              f"(tower {d.tower}, tol {args.tol if args.tol is not None else d.tol:g})")
        return 0
    print(f"FAIL: step {report.failed_step}: {report.reason} "
          f"(residual {report.residual:.6e})")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccset",
        description="circumcenter-closure dynamics, fills, and certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="iterated-center orbit of an angle fraction")
    p.add_argument("--alpha", type=_parse_fraction, required=True,
                   metavar="P/Q", help="alpha/pi as an exact fraction in [0,1)")
    p.add_argument("--steps", type=int, default=20)
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("synth", help="angle with a prescribed orbit shape")
    p.add_argument("--preperiod", "-L", type=int, required=True)
    p.add_argument("--period", "-P", type=int, required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("tm", help="complement-doubling bit stream")
    p.add_argument("--bits", type=int, default=64)
    p.add_argument("--steps", type=int, default=0,
                   help="also run the orbit this many steps and report |x| bounds")
    p.set_defaults(func=_cmd_tm)

    p = sub.add_parser("coverage", help="seeded histogram of random orbits")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("spiral", help="three-point circumcenter spiral")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--x", type=float, help="apex (x, 0) with base (0, -1), (0, 1)")
    group.add_argument("--beta", type=_parse_fraction, metavar="P/Q",
                       help="vertex angle as a fraction of pi")
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=_cmd_spiral)

    p = sub.add_parser("fill", help="dyadic segment or quadrilateral cloud")
    p.add_argument("mode", choices=("segment", "quad"))
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--ratio", type=_parse_fraction, default=Fraction(1, 2),
                   help="geometric ratio of the built-in base sequence")
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--patch", metavar="A,B,C,D",
                   help="explicit parameter box for quad mode")
    p.add_argument("--out", metavar="PATH", help="write the derivation file")
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=_cmd_fill)

    p = sub.add_parser("reach", help="derivation reaching a target point")
    p.add_argument("--seed", type=_parse_point, nargs=3, required=True,
                   metavar="X,Y", help="the three seed vertices")
    p.add_argument("--target", type=_parse_point, required=True, metavar="X,Y")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--out", metavar="PATH", help="write the derivation file")
    p.set_defaults(func=_cmd_reach)

    p = sub.add_parser("verify", help="check a derivation file")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=None,
                   help="override the tolerance recorded in the file")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (deriv.ParseError, fill.FillError, spiral.SpiralError,
            dynamics.DynamicsError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
