"""Command-line interface.

Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 parse or
parameter error, 3 rank error, 4 size guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import __version__
from .errors import ParseError, PrimsetError, RankError
from .experiments import (
    CSV_HEADER,
    SCHEMA_VERSION,
    LambdaSpec,
    convergence_table,
    count_lambda_points,
    covering_report,
    estimate_primitive_probability,
    exact_primitive_probability,
    inclusion_exclusion_identity,
    u_independence_check,
)
from .lattice import (
    IntMatrix,
    complete_to_basis,
    determinant,
    format_matrix,
    hnf,
    hnf_bounded,
    is_hnf,
    is_primitive,
    parse_rows,
    rank,
    saturation_index,
)
from .sampling import BoxFamily, crt_blind_box

DEFAULT_SEED = 0


def _frac(x):
    return f"{x.numerator}/{x.denominator}"


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _read_rows(path):
    """Rows plus the source line number of each row."""
    text = _read(path)
    rows = parse_rows(text)
    lines = [
        i
        for i, raw in enumerate(text.splitlines(), start=1)
        if raw.strip() and not raw.strip().startswith("#")
    ]
    return rows, lines


def _read_matrix(path):
    rows, lines = _read_rows(path)
    if not rows:
        raise ParseError(f"{path}: no matrix rows found")
    return rows, lines


def _rank_error_line(rows, lines):
    for i in range(len(rows)):
        if rank(rows[: i + 1]) <= i:
            return lines[i]
    return lines[-1]


class _Output:
    """Collects the payload and renders it as text or a JSON run record."""

    def __init__(self, args):
        self.args = args
        self.started = time.perf_counter()

    def emit(self, payload, text):
        if getattr(self.args, "json", False):
            record = {
                "schema_version": SCHEMA_VERSION,
                "command": self.args.command,
                "argv": sys.argv[1:],
                "params": _params(self.args),
                "seed": getattr(self.args, "seed", None),
                "version": __version__,
                "wall_time_s": round(time.perf_counter() - self.started, 6),
                "result": payload,
            }
            print(json.dumps(record, sort_keys=True))
        else:
            sys.stdout.write(text)


def _params(args):
    skip = {"func", "out", "command", "json", "csv"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cmd_hnf(args):
    rows, lines = _read_matrix(args.file)
    try:
        if args.bounded:
            result, report = hnf_bounded(rows, args.m0)
        else:
            result, report = hnf(rows), None
    except RankError as exc:
        raise RankError(exc.rank, exc.rows, _rank_error_line(rows, lines)) from None
    h, u = result
    if IntMatrix(rows) @ u != h or not is_hnf(h) or abs(determinant(u)) != 1:
        raise AssertionError("internal error: HNF verification failed")
    payload = {"h": h.tolist(), "u": u.tolist()}
    text = "# H\n" + format_matrix(h) + "# U\n" + format_matrix(u)
    if report is not None:
        payload["bound"] = report.to_dict()
        text += (
            f"# bound p!*q*M0^p = {report.bound} (M0={report.m0}), "
            f"max|U_ij| = {report.max_abs_u}\n"
        )
    args.out.emit(payload, text)
    return 0


def cmd_check(args):
    rows, _ = _read_matrix(args.file)
    primitive = is_primitive(rows)
    full_rank = rank(rows) == len(rows)
    index = saturation_index(rows) if full_rank else None
    verdict = "primitive" if primitive else "not-primitive"
    text = verdict + (f"\nindex {index}\n" if index is not None else "\nindex undefined (dependent rows)\n")
    args.out.emit({"verdict": verdict, "primitive": primitive, "index": index}, text)
    return 0 if primitive else 1


def cmd_complete(args):
    rows, _ = _read_matrix(args.file)
    basis = complete_to_basis(rows)
    det = determinant(basis)
    if abs(det) != 1:
        raise AssertionError("internal error: completed basis is not unimodular")
    args.out.emit({"basis": basis.tolist(), "det": det}, format_matrix(basis))
    return 0


def cmd_estimate(args):
    result = estimate_primitive_probability(
        args.d, args.m, args.box, args.n, args.trials, args.seed, args.workers
    )
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerow(result.csv_row())
        sys.stdout.write(buf.getvalue())
        return 0
    r = result.to_dict()
    text = (
        f"d={r['d']} m={r['m']} n={r['n']} box={r['box']} seed={r['seed']}\n"
        f"trials {r['trials']} successes {r['successes']}\n"
        f"estimate {r['estimate']:.10g} +- {r['std_error']:.10g}\n"
        f"target [{r['target']['lo_decimal']:.10g}, {r['target']['hi_decimal']:.10g}]\n"
        f"gap {r['gap']:.10g}\n"
    )
    args.out.emit(r, text)
    return 0


def cmd_exact(args):
    box = BoxFamily.parse(args.box).box(args.d, args.m, args.n)
    p = exact_primitive_probability(args.d, args.m, box)
    payload = {"box": box.to_dict(), "probability": _frac(p), "decimal": float(f"{float(p):.10g}")}
    args.out.emit(payload, f"{_frac(p)}\n{float(p):.10g}\n")
    return 0


def _prefix_and_box(args):
    prefix = []
    if args.prefix:
        prefix, _ = _read_rows(args.prefix)
    box = BoxFamily.parse(args.box).box(args.d, len(prefix) + 1, args.n)
    return prefix, box


def cmd_identity(args):
    prefix, box = _prefix_and_box(args)
    res = inclusion_exclusion_identity(prefix, box)
    payload = {"lhs": _frac(res.lhs), "rhs": _frac(res.rhs), "equal": res.equal}
    args.out.emit(payload, f"lhs {_frac(res.lhs)}\nrhs {_frac(res.rhs)}\nequal {res.equal}\n")
    return 0 if res.equal else 1


def cmd_counts(args):
    prefix, box = _prefix_and_box(args)
    spec = LambdaSpec.build(prefix, args.D, dim=args.d)
    counted = count_lambda_points(spec, box)
    payload = {
        "count": counted.count,
        "volume": counted.volume,
        "ratio": _frac(counted.ratio),
        "index": spec.index,
        "u_independent": u_independence_check(prefix, args.D, box),
    }
    text = f"count {counted.count}\nvolume {counted.volume}\nratio {_frac(counted.ratio)}\n"
    ok = payload["u_independent"]
    if args.D <= args.n:
        rep = covering_report(spec, box)
        payload["covering"] = {
            "lower_bound": _frac(rep["lower_bound"]),
            "upper_bound": _frac(rep["upper_bound"]),
            "bounds_hold": rep["bounds_hold"],
            "cubes": rep["cubes"],
            "per_cube_expected": rep["per_cube_expected"],
            "cubes_hold": rep["cubes_hold"],
        }
        text += (
            f"bounds [{_frac(rep['lower_bound'])}, {_frac(rep['upper_bound'])}] "
            f"hold {rep['bounds_hold']}\n"
            f"cubes {rep['cubes']} x {rep['per_cube_expected']} hold {rep['cubes_hold']}\n"
        )
        ok = ok and rep["bounds_hold"] and rep["cubes_hold"]
    text += f"u-independent {payload['u_independent']}\n"
    args.out.emit(payload, text)
    return 0 if ok else 1


def cmd_converge(args):
    rows = convergence_table(
        args.d, args.m, args.box, args.n_list, args.trials, args.seed, args.workers
    )
    if args.json:
        args.out.emit([r.to_dict() for r in rows], "")
        return 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.csv_row())
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_crt_box(args):
    box = crt_blind_box(args.d, args.n)
    found = [p for p in box.points(0) if is_primitive([p])]
    payload = {"box": box.to_dict(), "primitive_points": [list(p) for p in found]}
    text = (
        f"lower {' '.join(map(str, box.lower[0]))}\nn {box.n}\n"
        f"primitive points {len(found)}\n"
    )
    args.out.emit(payload, text)
    return 0 if not found else 1


def _n_list(text):
    try:
        return [int(float(tok)) if "e" in tok else int(tok) for tok in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n list {text!r}") from None


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="primset", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="emit a JSON run record")
        return p

    p = add("hnf", cmd_hnf, "Hermite normal form with unimodular multiplier")
    p.add_argument("file", help="matrix file ('-' for stdin)")
    p.add_argument("--bounded", action="store_true", help="use the bounded construction")
    p.add_argument("--m0", type=_positive, default=None, help="strict entry bound")

    p = add("check", cmd_check, "primitivity verdict and saturation index")
    p.add_argument("file")

    p = add("complete", cmd_complete, "complete a primitive set to a basis of Z^d")
    p.add_argument("file")

    def sampling_args(p, with_m=True):
        p.add_argument("-d", type=_positive, required=True)
        if with_m:
            p.add_argument("-m", type=int, required=True)
        p.add_argument("--box", default="centered", help="origin|centered|poly:J|file=PATH|crt")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--workers", type=_positive, default=1)

    p = add("estimate", cmd_estimate, "Monte Carlo primitive-set probability")
    sampling_args(p)
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--trials", type=_positive, default=10**5)
    p.add_argument("--csv", action="store_true")

    p = add("exact", cmd_exact, "exact probability by enumeration")
    p.add_argument("-d", type=_positive, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--box", default="origin")

    for name, func, help in (
        ("identity", cmd_identity, "exact inclusion-exclusion identity"),
        ("counts", cmd_counts, "sublattice point counts and covering bounds"),
    ):
        p = add(name, func, help)
        p.add_argument("--prefix", default=None, help="primitive prefix matrix file")
        p.add_argument("-d", type=_positive, required=True)
        p.add_argument("-n", type=_positive, required=True)
        p.add_argument("--box", default="origin")
        if name == "counts":
            p.add_argument("-D", type=_positive, required=True)

    p = add("converge", cmd_converge, "convergence table as CSV")
    sampling_args(p)
    p.add_argument("--n-list", type=_n_list, default=[10**k for k in range(2, 7)])
    p.add_argument("--trials", type=_positive, default=10**5)
    p.add_argument("--output", default=None, help="CSV path (default stdout)")

    p = add("crt-box", cmd_crt_box, "CRT box with no visible points")
    p.add_argument("-d", type=_positive, required=True)
    p.add_argument("-n", type=_positive, required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out = _Output(args)
    try:
        return args.func(args)
    except PrimsetError as exc:
        print(f"primset {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
