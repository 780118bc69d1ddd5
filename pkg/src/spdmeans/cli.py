"""Command-line front end.

Subcommands ``mean``, ``dist``, ``check``, ``repro``, ``curves`` and
``hunt``. Global flags may appear before or after the subcommand.

Exit codes: 0 success, 1 a checked property failed (or a reproduced value
mismatched), 2 invalid input, unknown suite or unknown property.
"""
import argparse
import csv
import json
import sys
import time

from . import io as spdio
from . import suites
from .exceptions import SpdError, UnknownPropertyError
from .means import Family, MeanSpec, evaluate
from .metrics import MetricKind, d_logdet, distance
from .properties import CurveSpec, uniform_grid
from .search import HUNTABLE, PaperCase, SamplerConfig, iter_hunt, paper_registry

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2

CURVE_RADIUS_ATOL = 1e-9


class InvalidInput(Exception):
    """Raised for bad command-line values; maps to exit code 2."""


def _range(text, kind):
    lo, sep, hi = text.partition("..")
    try:
        lo = kind(lo)
        hi = kind(hi) if sep else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <lo>..<hi>, got {text!r}")
    return lo, hi


def _int_range(text):
    return _range(text, int)


def _float_range(text):
    return _range(text, float)


def _global_flags(parser, suppress):
    # subparsers repeat the flags with SUPPRESS defaults so that a value
    # given before the subcommand is not overwritten
    def d(value):
        return argparse.SUPPRESS if suppress else value

    g = parser.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=d(suites.DEFAULT_CONFIG.seed), help="master seed")
    g.add_argument("--trials", type=int, default=d(1000), help="random pairs per sweep")
    g.add_argument("--dims", type=_int_range, default=d(None), metavar="A..B")
    g.add_argument("--cond", type=_float_range, default=d(None), metavar="LO..HI")
    g.add_argument("--grid", type=int, default=d(21), help="grid size for curves")
    g.add_argument("--precision", type=int, default=d(6), help="significant digits")
    g.add_argument("--out", default=d(None), help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spdmeans", description="Matrix means, metrics and property checks on SPD matrices."
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mean", help="compute a mean of two matrices")
    p.add_argument("family", choices=[f.value for f in Family])
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("-t", type=float, default=0.5)
    p.add_argument("-p", type=float, default=None)
    _global_flags(p, suppress=True)

    p = sub.add_parser("dist", help="distance or fidelity between two matrices")
    p.add_argument("metric", choices=[m.value for m in MetricKind])
    p.add_argument("A")
    p.add_argument("B")
    _global_flags(p, suppress=True)

    p = sub.add_parser("check", help="run a property suite")
    p.add_argument("suite", help=f"one of {', '.join(suites.SUITES)}, all")
    _global_flags(p, suppress=True)

    p = sub.add_parser("repro", help="reproduce the registered counterexamples")
    p.add_argument("--registry", default=None, help="JSON list of cases (replaces the built-in)")
    _global_flags(p, suppress=True)

    p = sub.add_parser("curves", help="log-det distances along three curves, as CSV")
    p.add_argument("A")
    p.add_argument("B")
    _global_flags(p, suppress=True)

    p = sub.add_parser("hunt", help="search random pairs for violations")
    p.add_argument("property", help=f"one of {', '.join(HUNTABLE)}")
    p.add_argument(
        "--params",
        default="{}",
        help="JSON object of checker arguments; list values are expanded into a grid",
    )
    _global_flags(p, suppress=True)
    return parser


def _fmt(value, precision):
    return f"{value:#.{precision}g}"


def _open_out(args):
    if args.out is None:
        return sys.stdout, False
    return open(args.out, "w", encoding="utf-8", newline=""), True


def _write_text(args, text):
    fh, close = _open_out(args)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _sampler(args):
    changes = {"seed": args.seed}
    if args.dims is not None:
        changes["dim_range"] = args.dims
    if args.cond is not None:
        changes["cond_range"] = args.cond
    return SamplerConfig(**changes)


def cmd_mean(args):
    A, B = spdio.read_matrix(args.A), spdio.read_matrix(args.B)
    spec = MeanSpec(args.family, args.t, args.p)
    M = evaluate(spec, A, B)
    fh, close = _open_out(args)
    try:
        spdio.write_matrix(M, fh)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_dist(args):
    A, B = spdio.read_matrix(args.A), spdio.read_matrix(args.B)
    _write_text(args, _fmt(distance(args.metric, A, B), args.precision) + "\n")
    return EXIT_OK


def cmd_check(args):
    if args.suite != "all" and args.suite not in suites.SUITES:
        raise InvalidInput(f"unknown suite {args.suite!r}; choose from {', '.join(suites.SUITES)}, all")
    if args.trials < 0:
        raise InvalidInput("--trials must be nonnegative")
    records = suites.run_suite(
        args.suite, trials=args.trials, seed=args.seed, dim_range=args.dims, cond_range=args.cond
    )
    _write_text(args, spdio.dumps_records(records))
    failed = suites.failed(records)
    for r in failed:
        print(
            f"FAIL {r.property_id} {json.dumps(r.params, sort_keys=True)} "
            f"violations={r.violations}/{r.trials} margin={r.margin:.3g}",
            file=sys.stderr,
        )
    n = sum(1 for r in records if hasattr(r, "passed"))
    print(f"{n - len(failed)}/{n} reports passed", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def _load_registry(path):
    with open(path, encoding="utf-8") as fh:
        return [PaperCase.from_dict(d) for d in json.load(fh)]


def cmd_repro(args):
    cases = paper_registry() if args.registry is None else _load_registry(args.registry)
    prec = args.precision
    lines = ["case\tquantity\texpected\tcomputed\ttolerance\tstatus"]
    ok = True
    for case in cases:
        for label, expected, got, tol, match in case.compare():
            ok &= match
            lines.append(
                "\t".join(
                    [case.id, label, repr(expected), _fmt(got, prec), f"{tol:g}", "ok" if match else "MISMATCH"]
                )
            )
    _write_text(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAILED


CURVE_HEADER = ("t", "curve", "d_logdet_from_geo_mean", "d_logdet_from_A")


def curve_rows(A, B, grid_size):
    """``(t, curve, d_l(A#B, point), d_l(A, point))`` for the three curves."""
    grid = uniform_grid(grid_size)
    center = evaluate(MeanSpec("geodesic", 0.5), A, B)
    rows = []
    for kind in ("geodesic", "heron", "diamond"):
        curve = CurveSpec(kind, grid)
        for t, M in zip(grid, curve.points(A, B)):
            rows.append((t, kind, d_logdet(center, M), d_logdet(A, M)))
    return rows


def cmd_curves(args):
    A, B = spdio.read_matrix(args.A, semidefinite=False), spdio.read_matrix(args.B, semidefinite=False)
    if args.grid < 2:
        raise InvalidInput("--grid must be at least 2")
    rows = curve_rows(A, B, args.grid)
    fh, close = _open_out(args)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for t, kind, dc, da in rows:
            w.writerow([_fmt(t, args.precision), kind, _fmt(dc, args.precision), _fmt(da, args.precision)])
    finally:
        if close:
            fh.close()
    radius = 0.5 * d_logdet(A, B)
    outside = [r for r in rows if r[2] > radius + CURVE_RADIUS_ATOL]
    for t, kind, dc, _ in outside:
        print(f"outside radius {radius:.6g}: {kind} t={t:g} d={dc:.6g}", file=sys.stderr)
    return EXIT_FAILED if outside else EXIT_OK


def cmd_hunt(args):
    if args.property not in HUNTABLE:
        raise InvalidInput(f"unknown property {args.property!r}; choose from {', '.join(HUNTABLE)}")
    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"--params is not valid JSON: {exc}")
    if not isinstance(params, dict):
        raise InvalidInput("--params must be a JSON object")
    config = _sampler(args)
    start = time.perf_counter()
    found, trials_hit = 0, set()
    fh, close = _open_out(args)
    try:
        for trial, report in iter_hunt(args.property, params, config, args.trials):
            fh.write(spdio.dumps_line(report) + "\n")
            found += 1
            trials_hit.add(trial)
    finally:
        if close:
            fh.close()
    print(
        f"hunt {args.property}: {found} violations in {len(trials_hit)}/{args.trials} trials "
        f"(seed {config.seed}, {time.perf_counter() - start:.1f}s)",
        file=sys.stderr,
    )
    return EXIT_OK


COMMANDS = {
    "mean": cmd_mean,
    "dist": cmd_dist,
    "check": cmd_check,
    "repro": cmd_repro,
    "curves": cmd_curves,
    "hunt": cmd_hunt,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (InvalidInput, SpdError, UnknownPropertyError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
