"""Command line entry point: ``solve``, ``green`` and ``verify``.

Exit codes: 0 success, 1 an inequality margin failed (``verify``), 2 invalid
input, 3 singular or unsolvable problem.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

import numpy as np

from . import greens
from .errors import DomainError, SingularError, ValidationError
from .greens import SturmLiouvilleBC, greens_function, inequality_margins
from .problem import BUILTINS, ProblemFile, coefficient, format_float, parse_bc, run
from .selfadjoint import SelfAdjointProblem

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_SINGULAR = 0, 1, 2, 3

TOL_ENV = "NABLA_FRAC_TOL"


def default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return greens.SINGULAR_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ValidationError(f"{TOL_ENV} must be a number, got {raw!r}") from None
    if not tol > 0:
        raise ValidationError(f"{TOL_ENV} must be positive")
    return tol


def _tol(args) -> float:
    if args.tol is None:
        return default_tol()
    if not args.tol > 0:
        raise ValidationError("--tol must be positive")
    return args.tol


def _coef_arg(text: str | None, default):
    """``--p``/``--q`` value: number, builtin name or comma-separated list."""
    if text is None:
        return default
    try:
        return float(text)
    except ValueError:
        pass
    if text in BUILTINS:
        return text
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse coefficient {text!r}") from None


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"--{name}: expected comma-separated numbers, got {text!r}") from None


def parse_range(text: str, name: str, integer: bool = False) -> list[float]:
    """``lo:hi[:step]`` (inclusive) or a comma list."""
    if ":" not in text:
        vals = _float_list(text, name)
    else:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValidationError(f"--{name}: expected lo:hi[:step], got {text!r}")
        lo, hi, *rest = _float_list(",".join(parts), name)
        step = rest[0] if rest else 1.0
        if step <= 0:
            raise ValidationError(f"--{name}: step must be positive")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1 if hi >= lo else 0
        vals = [round(lo + i * step, 12) for i in range(count)]
    if integer and any(not float(v).is_integer() for v in vals):
        raise ValidationError(f"--{name}: values must be integers")
    if not vals:
        raise ValidationError(f"--{name}: empty range {text!r}")
    return vals


def _write(out: Path | None, name: str, text: str) -> None:
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    prob = ProblemFile.load(args.problem)
    text, report = run(prob, args.caputo_boundary_at_b, _tol(args))
    out = Path(args.out) if args.out else None
    _write(out, "solution.csv", text)
    _write(out, "report.json", report.to_json())
    if out is None:
        sys.stdout.write(text)
    print(f"{prob.kind}: {report.solution.domain.size} points, residual max {report.residual_max:.3e}",
          file=sys.stderr)
    return EXIT_OK


def green_csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "s", "G", "branch"])
    pts = table.domain.points()
    for t in pts:
        for s in pts:
            w.writerow([format_float(t), format_float(s), format_float(table(t, s)), table.branch(t, s)])
    return buf.getvalue()


def cmd_green(args) -> int:
    bc = parse_bc(_float_list(args.bc, "bc")).homogeneous()
    a, b = args.a, args.b
    try:
        prob = SelfAdjointProblem(
            a, b, args.nu,
            coefficient(_coef_arg(args.p, 1.0), "p", a + 1, b),
            coefficient(_coef_arg(args.q, 0.0), "q", a + 1, b - 1),
            coefficient(0.0, "h", a + 1, b - 1),
        )
    except DomainError as exc:
        raise ValidationError(str(exc)) from None
    table = greens_function(prob, bc, args.caputo_boundary_at_b, _tol(args))
    text = green_csv(table)
    out = Path(args.out) if args.out else None
    _write(out, "green.csv", text)
    if out is None:
        sys.stdout.write(text)
    return EXIT_OK


VERIFY_HEADER = ["a", "b", "nu", "max_G", "min_G_plus_bound", "row_sum_margin", "diff_sum_margin", "status"]


def cmd_verify(args) -> int:
    bs = parse_range(args.b, "b", integer=True)
    nus = parse_range(args.nu, "nu")
    tol = _tol(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(VERIFY_HEADER)
    ok = True
    for b in bs:
        for nu in nus:
            try:
                rep = inequality_margins(args.a, b, nu, method=args.method)
            except DomainError as exc:
                raise ValidationError(str(exc)) from None
            passed = rep.passed(tol)
            ok &= passed
            w.writerow([f"{args.a:g}", f"{b:g}", f"{nu:g}", *(format_float(m) for m in rep.margins),
                        "PASS" if passed else "FAIL"])
    text = buf.getvalue()
    sys.stdout.write(text)
    _write(Path(args.out) if args.out else None, "verify.csv", text)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nablafrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory")
        p.add_argument("--tol", type=float, default=None,
                       help=f"relative zero tolerance (default {greens.SINGULAR_TOL:g}, env {TOL_ENV})")

    p = sub.add_parser("solve", help="solve the problem in a JSON problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--caputo-boundary-at-b", action="store_true",
                   help="use the Caputo difference in the boundary row at b")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("green", help="tabulate the Green's function")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--bc", default="1,0,1,0", help="alpha,beta,gamma,delta[,A,B] (default Dirichlet)")
    p.add_argument("--p", help="number, builtin name or comma list on N_{a+1}^b")
    p.add_argument("--q", help="number, builtin name or comma list on N_{a+1}^{b-1}")
    p.add_argument("--caputo-boundary-at-b", action="store_true")
    common(p)
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("verify", help="sweep the four Green's inequalities of the conjugate problem")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", default="2:12", help="b values, lo:hi or comma list")
    p.add_argument("--nu", default="0.1:0.9:0.1", help="orders, lo:hi:step or comma list")
    p.add_argument("--method", choices=("closed", "constructed"), default="closed")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except SingularError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
