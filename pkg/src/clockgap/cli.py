"""Command-line front end: ``clockgap {spectrum,bounds,sweep,certify,selftest}``.

Exit codes: 0 success, 1 certification/self-test failure, 2 usage error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict

import numpy as np

from . import bounds
from .certifier import CSV_FIELDS, DEFAULT_GRID_SIZE, certify, sweep
from .eigensolver import SolverConfig, smallest_eigenvalues
from .errors import ClockGapError, ConvergenceError
from .operators import ClockFamilySpec, build_hj, eigen_residuals

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def parse_d(text: str) -> tuple[int, int]:
    """``"7"`` or inclusive range ``"2..64"``."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension {text!r}; use N or A..B")
    if lo < 2 or hi < lo:
        raise argparse.ArgumentTypeError(f"dimension range {text!r} must satisfy 2 <= A <= B")
    return lo, hi


def parse_s(text: str):
    """A single s in [0, 1] (float) or ``steps=N`` (int grid size >= 2)."""
    if text.startswith("steps="):
        try:
            n = int(text[len("steps="):])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid spec {text!r}")
        if n < 2:
            raise argparse.ArgumentTypeError("steps must be >= 2")
        return n
    try:
        s = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad s value {text!r}; use a number or steps=N")
    if not 0.0 <= s <= 1.0:
        raise argparse.ArgumentTypeError(f"s must lie in [0, 1], got {s}")
    return s


def parse_blocks(text: str) -> list[tuple[float, int]]:
    """Comma list of ``b`` or ``b x mult`` (``x``, ``×`` or ``*``)."""
    out = []
    for item in text.split(","):
        item = item.strip().replace("×", "x").replace("*", "x")
        try:
            if "x" in item:
                b, m = item.split("x", 1)
                out.append((float(b), int(m)))
            else:
                out.append((float(item), 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad block entry {item!r}")
    for b, m in out:
        if b < 1 or m < 1:
            raise argparse.ArgumentTypeError(
                f"block weights must be >= 1 and multiplicities >= 1, got {b}x{m}"
            )
    return out


def parse_tol(text: str) -> float:
    try:
        tol = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance {text!r}")
    if not tol > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return tol


def fmt_real(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(rows: list[dict], fields, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([fmt_real(row.get(f)) for f in fields])


def _emit(args, rows: list[dict], fields) -> None:
    buf = io.StringIO()
    if args.format == "json":
        json.dump(rows, buf, indent=2)
        buf.write("\n")
    else:
        write_csv(rows, fields, buf)
    text = buf.getvalue()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _single(args, name):
    lo, hi = args.d
    if lo != hi:
        raise ClockGapError(f"{name} needs a single --d, got a range")
    return lo


def _family(args, d):
    return None if not args.blocks else ClockFamilySpec.from_weights(d, args.blocks)


def cmd_spectrum(args) -> int:
    d = _single(args, "spectrum")
    if not isinstance(args.s, float):
        raise ClockGapError("spectrum needs a single --s value")
    s, b = args.s, args.b
    cfg = SolverConfig(abs_tol=args.tol, want_vectors=True)
    T = build_hj(d, s, b)
    res = smallest_eigenvalues(T, args.k, cfg)
    closed = None
    if s == 1.0 and b == 0.5:
        closed = [p.lam for p in bounds.lemma_spectrum(d)]
    rows = []
    for n, (lam, u) in enumerate(zip(res.eigenvalues, res.eigenvectors), start=1):
        interior, left, right = eigen_residuals(d, s, b, lam, u)
        row = {
            "n": n,
            "eigenvalue": float(lam),
            "operator_residual": float(np.linalg.norm(T @ u - lam * u)),
            "interior_residual": interior,
            "left_residual": left,
            "right_residual": right,
            "closed_form": None,
            "closed_form_delta": None,
        }
        if closed is not None:
            row["closed_form"] = closed[n - 1]
            row["closed_form_delta"] = abs(float(lam) - closed[n - 1])
        rows.append(row)
    _emit(args, rows, list(rows[0]))
    return EXIT_OK


def _s_values(args):
    if isinstance(args.s, int):
        return np.linspace(0.0, 1.0, args.s)
    return np.array([args.s])


def cmd_bounds(args) -> int:
    lo, hi = args.d
    rows = [
        asdict(bounds.bound_curve(d, s))
        for d in range(lo, hi + 1)
        for s in _s_values(args)
    ]
    _emit(args, rows, list(bounds.BoundCurve.__dataclass_fields__))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not isinstance(args.s, int):
        raise ClockGapError("sweep needs a grid, e.g. --s steps=101")
    cfg = SolverConfig(abs_tol=args.tol)
    lo, hi = args.d
    rows = []
    for d in range(lo, hi + 1):
        rows.extend(asdict(r) for r in sweep(d, _family(args, d), args.s, cfg))
    _emit(args, rows, CSV_FIELDS)
    return EXIT_OK


def cmd_certify(args) -> int:
    if not isinstance(args.s, int):
        raise ClockGapError("certify needs a grid, e.g. --s steps=1001")
    grid = args.s
    cfg = SolverConfig(abs_tol=args.tol)
    lo, hi = args.d
    certs = []
    for d in range(lo, hi + 1):
        certs.append(certify(d, None, grid, cfg))
        if args.blocks:
            certs.append(certify(d, _family(args, d), grid, cfg))
    dicts = [c.to_dict() for c in certs]
    if args.format == "csv":
        for row in dicts:
            if row["family"] is not None:
                row["family"] = ";".join(f"{b:g}x{m}" for b, m in row["family"])
    _emit(args, dicts, list(dicts[0]))
    return EXIT_OK if all(c.verdict_floor for c in certs) else EXIT_FAIL


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(tol=args.tol, mu0_error=args.inject_mu0)
    width = max(len(r.name) for r in results)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8")
    try:
        for r in results:
            out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}\n")
        n_bad = sum(not r.passed for r in results)
        out.write(f"{len(results) - n_bad}/{len(results)} checks passed\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "certify": cmd_certify,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=parse_tol, default=1e-12,
                        help="bisection half-width (default 1e-12)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output file (default stdout)")

    def with_d(p, required=True):
        p.add_argument("--d", type=parse_d, required=required, help="N or A..B")

    parser = argparse.ArgumentParser(
        prog="clockgap",
        description="Spectra, analytic bounds and gap certificates for clock Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="lowest eigenvalues of H_j(s)")
    with_d(p)
    p.add_argument("--s", type=parse_s, required=True)
    p.add_argument("--b", type=float, default=0.0, help="boundary weight (default 0 = H0)")
    p.add_argument("--k", type=int, default=2)

    p = sub.add_parser("bounds", parents=[common], help="analytic bounds at (d, s)")
    with_d(p)
    p.add_argument("--s", type=parse_s, required=True)

    for name, text in (("sweep", "gap sweep over s"), ("certify", "certify the gap floor")):
        p = sub.add_parser(name, parents=[common], help=text)
        with_d(p)
        p.add_argument("--s", type=parse_s, default=DEFAULT_GRID_SIZE,
                       help=f"grid spec steps=N (default steps={DEFAULT_GRID_SIZE})")
        p.add_argument("--blocks", type=parse_blocks, default=None,
                       help="non-zero weights, e.g. 1,2,7 or 1x2 (b=0 block is implicit)")

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    p.add_argument("--inject-mu0", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "k", 1) < 1:
            raise ClockGapError(f"--k must be >= 1, got {args.k}")
        return COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"clockgap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ClockGapError, ValueError) as exc:
        print(f"clockgap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
