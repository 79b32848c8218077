"""Command-line entry point: ``sgexpand solve|verify|plot``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import driver
from .errors import SGEError
from .problem import load_problem

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


def _common(parser: argparse.ArgumentParser, default):
    parser.add_argument("--seed", type=int, default=default, help="sampling seed")
    parser.add_argument("--tol", type=float, default=default, help="residual tolerance")
    parser.add_argument("--max-pairs", type=int, default=default,
                        help="cap on Buchberger critical pairs")


def _param(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip() or not value.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return name.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sgexpand",
                                description="Sine-Gordon expansion travelling-wave solver")
    _common(p, None)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a problem file and write a report")
    s.add_argument("problem", type=Path)
    s.add_argument("--out", type=Path, default=None,
                   help="report directory (default: <problem name>-report)")
    _common(s, argparse.SUPPRESS)

    v = sub.add_parser("verify", help="numerically re-verify a report")
    v.add_argument("report", type=Path)
    v.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE")
    _common(v, argparse.SUPPRESS)

    pl = sub.add_parser("plot", help="sample a branch on a grid and write CSV")
    pl.add_argument("report", type=Path)
    pl.add_argument("--branch", required=True)
    pl.add_argument("--grid", required=True,
                    help="eta=-5:5:201 | x=-5:5:101;t=0 | x=-5:5:41,t=-5:5:41;y=0,z=0")
    pl.add_argument("--out", type=Path, required=True)
    pl.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE")
    _common(pl, argparse.SUPPRESS)
    return p


def _options(base, args):
    return driver.with_overrides(base, seed=args.seed, tol=args.tol, max_pairs=args.max_pairs)


def _report_path(path: Path) -> Path:
    return path / "report.json" if path.is_dir() else path


def cmd_solve(args, out) -> int:
    pf = load_problem(args.problem)
    res = driver.solve_problem(pf, _options(pf.options, args))
    rep = driver.build_report(res)
    out_dir = args.out or Path(f"{pf.name}-report")
    jpath, _ = driver.write_report(rep, out_dir)
    out.write(driver.report_text(rep))
    out.write(f"report written to {jpath}\n")
    if res.error is not None:
        print(f"error: {res.error}", file=sys.stderr)
        return res.error.exit_code
    if not res.verified:
        bad = [bid for bid, v in res.verification.items()
               if not isinstance(v, str) and not v.passed]
        print(f"error: residual check failed for {', '.join(bad)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_verify(args, out) -> int:
    rep = driver.load_report(_report_path(args.report))
    pf = driver.report_problem(rep)
    results = driver.verify_report(rep, dict(args.param), _options(pf.options, args))
    failed = []
    out.write(f"{'branch':<8} {'status':<7} {'max residual':>13} points\n")
    for bid, r in results:
        status = "pass" if r.passed else "FAIL"
        out.write(f"{bid:<8} {status:<7} {r.max_residual:>13.3e} {r.points}\n")
        for point, msg in r.failures[:3]:
            out.write(f"         at {point}: {msg}\n")
        if not r.passed:
            failed.append(bid)
    if failed:
        print(f"error: verification failed for {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def cmd_plot(args, out) -> int:
    rep = driver.load_report(_report_path(args.report))
    try:
        grid = driver.plot_report(rep, args.branch, args.grid, dict(args.param))
    except ValueError as exc:
        print(f"error: bad grid: {exc}", file=sys.stderr)
        return EXIT_USAGE
    path = driver.write_plot_csv(grid, args.out)
    out.write(f"{len(grid.rows)} rows written to {path}\n")
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    handler = {"solve": cmd_solve, "verify": cmd_verify, "plot": cmd_plot}[args.command]
    try:
        return handler(args, out)
    except SGEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
