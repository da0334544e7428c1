"""Command-line front end for the verification suites.

Six subcommands cover the constant table, totient-sum residuals, the
averaged progression bias (direct, switched, or both), the shifted-divisor
sum, the Mellin residue and Perron kernel checks, and the smooth-modulus
proportion scan. Output is a plain table, RFC-4180 CSV with fixed columns,
or a single JSON object {"config", "results", "version"}.

Numbers serialize as decimal strings tagged with a significant-digit count
and a provenance marker (exact, high-precision, or predicted), so acceptance
tooling never round-trips binary floats. Timing fields and thread counts are
left out of every format: identical configs must produce identical bytes at
any thread count. CSV files are opened in append mode and the header is only
written when the file starts empty; columns are fixed per subcommand and new
ones may only ever be appended.

Exit codes: 0 success, 1 domain/usage error, 2 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import mpmath as mp

from . import __version__
from ._accum import resolve_threads
from .arith import smooth_proportion
from .bias import average_direct, average_switched, titchmarsh_sum
from .constants import c1, c3, c5
from .errors import DomainError, NumericError, UnsupportedModeError
from .mellin import perron_kernel_check, residue_check
from .totient_sums import (residual_scaling_scan, sum_inv_phi,
                           weighted_sum_inv_phi)
from .zetafn import euler_gamma

_CSV_COLUMNS = {
    "constants": ("name", "a", "value", "truncation_prime", "tail_bound"),
    "totient-check": ("record", "a", "M", "value", "predicted", "residual",
                      "bound"),
    "bias": ("a", "x", "M", "counting", "baseline", "algorithm",
             "observed_average", "predicted", "residual", "error"),
    "titchmarsh": ("a", "x", "sum_value", "predicted", "relative_residual"),
    "mellin": ("check", "a", "M", "center", "radius", "nodes", "y", "kappa",
               "T", "value", "predicted", "error", "bound"),
    "smooth-scan": ("X", "M", "proportion", "limit_value", "abs_error"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; the contract wants 1
        raise DomainError(message)


def _sig_digits(s: str) -> int:
    digs = [ch for ch in s.split("e")[0].split("E")[0] if ch.isdigit()]
    while digs and digs[0] == "0":
        digs.pop(0)
    return max(1, len(digs))


def _num(value, provenance: str) -> dict:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        s = str(value)
    elif isinstance(value, float):
        s = repr(value)
    else:
        with mp.workdps(40):
            s = mp.nstr(mp.mpf(value), 20, strip_zeros=True)
    return {"value": s, "digits": _sig_digits(s), "provenance": provenance}


def _cell(num: dict | None) -> str:
    return "" if num is None else num["value"]


def _ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise DomainError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise DomainError(f"expected comma-separated numbers, got {text!r}")


def _number(tok: float) -> float | int:
    return int(tok) if float(tok).is_integer() else float(tok)


def _run_constants(args, threads):
    rows, results = [], []
    specs = [("C1", c1(args.a)), ("C3", c3(args.a)), ("C5", c5())]
    for name, const in specs:
        rec = {
            "name": name,
            "a": _num(args.a, "exact") if name != "C5" else None,
            "value": _num(const.value, "high-precision"),
            "truncation_prime": _num(const.truncation_prime, "exact"),
            "tail_bound": _num(const.tail_bound, "high-precision"),
        }
        results.append({k: v for k, v in rec.items() if v is not None})
        rows.append({k: _cell(v) if k != "name" else v
                     for k, v in rec.items()})
    return rows, results


def _run_totient_check(args, threads):
    rows, results = [], []
    grid = [_number(m) for m in args.m_grid]
    for a in args.a:
        for M in grid:
            for record, res in (("inv_phi", sum_inv_phi(M, a)),
                                ("weighted_inv_phi", weighted_sum_inv_phi(M, a))):
                with mp.workdps(40):
                    bound = 5 * mp.log(M) / M if record == "inv_phi" else None
                    ev = res.exact
                    if hasattr(ev, "denominator"):  # exact Fraction path
                        ev = mp.mpf(ev.numerator) / ev.denominator
                rec = {
                    "record": record,
                    "a": _num(a, "exact"),
                    "M": _num(M, "exact"),
                    "value": _num(ev, "high-precision"),
                    "predicted": _num(res.predicted, "predicted"),
                    "residual": _num(res.residual, "high-precision"),
                    "bound": _num(bound, "predicted") if bound is not None else None,
                }
                results.append({k: v for k, v in rec.items() if v is not None})
                rows.append({k: (v if k == "record" else _cell(v))
                             for k, v in rec.items()})
        scan = residual_scaling_scan(a, grid)
        rec = {"record": "slope", "a": _num(a, "exact"), "M": None,
               "value": _num(scan.slope, "high-precision"),
               "predicted": None, "residual": None, "bound": None}
        results.append({k: v for k, v in rec.items() if v is not None})
        rows.append({k: (v if k == "record" else _cell(v))
                     for k, v in rec.items()})
    return rows, results


def _bias_cell(a, x, M, args, threads):
    reports = {}
    if args.algo in ("direct", "both"):
        reports["direct"] = average_direct(a, x, M, args.counting,
                                           args.baseline, threads)
    if args.algo in ("switched", "both"):
        reports["switched"] = average_switched(a, x, M, args.counting,
                                               args.baseline, threads)
    return reports


def _run_bias(args, threads):
    rows, results = [], []
    failures = []
    x = _number(args.x)
    for a in sorted(args.a):
        for M in sorted(_number(m) for m in args.m):
            try:
                reports = _bias_cell(a, x, M, args, threads)
            except (DomainError, UnsupportedModeError, NumericError) as exc:
                failures.append(exc)
                rec = {"a": _num(a, "exact"), "M": _num(M, "exact"),
                       "error": str(exc)}
                results.append(rec)
                rows.append({"a": _cell(rec["a"]), "x": "", "M": _cell(rec["M"]),
                             "counting": args.counting, "baseline": args.baseline,
                             "algorithm": args.algo, "observed_average": "",
                             "predicted": "", "residual": "", "error": str(exc)})
                continue
            merged = {"a": _num(a, "exact"), "x": _num(int(x), "exact"),
                      "M": _num(M, "exact"), "counting": args.counting,
                      "baseline": args.baseline}
            any_rep = next(iter(reports.values()))
            merged["predicted"] = _num(any_rep.predicted, "predicted")
            for name, rep in reports.items():
                suffix = f"_{name}" if args.algo == "both" else ""
                merged[f"observed{suffix}"] = _num(rep.observed_average,
                                                   "high-precision")
                merged[f"residual{suffix}"] = _num(rep.residual,
                                                   "high-precision")
                rows.append({
                    "a": str(a), "x": str(int(x)), "M": _cell(merged["M"]),
                    "counting": args.counting, "baseline": args.baseline,
                    "algorithm": name,
                    "observed_average": _num(rep.observed_average,
                                             "high-precision")["value"],
                    "predicted": merged["predicted"]["value"],
                    "residual": _num(rep.residual, "high-precision")["value"],
                    "error": "",
                })
            if args.algo != "both":
                merged["algorithm"] = args.algo
            results.append(merged)
            failures.append(None)
    if failures and all(f is not None for f in failures):
        raise failures[0]
    return rows, results


def _run_titchmarsh(args, threads):
    rep = titchmarsh_sum(args.a, _number(args.x))
    rec = {"a": _num(rep.a, "exact"), "x": _num(rep.x, "exact"),
           "sum_value": _num(rep.sum_value, "high-precision"),
           "predicted": _num(rep.predicted, "predicted"),
           "relative_residual": _num(rep.relative_residual, "high-precision")}
    return [{k: _cell(v) for k, v in rec.items()}], [rec]


def _run_mellin(args, threads):
    rows, results = [], []
    centers = [0, -1] if args.center == "both" else [int(args.center)]
    M = _number(args.m)
    for center in centers:
        chk = residue_check(center, args.a, M, radius=args.radius)
        err = abs(chk.value.re - float(chk.predicted))
        rec = {"check": "residue", "a": _num(args.a, "exact"),
               "M": _num(M, "exact"), "center": _num(center, "exact"),
               "radius": _num(args.radius, "exact"),
               "nodes": _num(chk.quadrature_nodes, "exact"),
               "value": _num(chk.value.re, "high-precision"),
               "predicted": _num(chk.predicted, "predicted"),
               "error": _num(err, "high-precision")}
        results.append(rec)
        rows.append({c: _cell(rec.get(c)) if c != "check" else "residue"
                     for c in _CSV_COLUMNS["mellin"]})
    if not args.skip_perron:
        for T in _floats(args.T):
            for y in _floats(args.y):
                integral, exact, bound = perron_kernel_check(y, args.kappa, T)
                rec = {"check": "perron", "y": _num(y, "exact"),
                       "kappa": _num(args.kappa, "exact"),
                       "T": _num(_number(T), "exact"),
                       "value": _num(integral, "high-precision"),
                       "predicted": _num(exact, "exact"),
                       "error": _num(abs(integral - exact), "high-precision"),
                       "bound": _num(bound, "predicted")}
                results.append(rec)
                rows.append({c: _cell(rec.get(c)) if c != "check" else "perron"
                             for c in _CSV_COLUMNS["mellin"]})
    return rows, results


def _run_smooth_scan(args, threads):
    rows, results = [], []
    X = int(_number(args.x))
    with mp.workdps(30):
        limit_value = mp.e ** (-euler_gamma()[0])
    for M in sorted(int(_number(m)) for m in args.m_grid):
        prop = smooth_proportion(X, M)
        with mp.workdps(40):
            pv = mp.mpf(prop.numerator) / prop.denominator
            err = abs(pv - limit_value)
        rec = {"X": _num(X, "exact"), "M": _num(M, "exact"),
               "proportion": _num(pv, "exact"),
               "limit_value": _num(limit_value, "predicted"),
               "abs_error": _num(err, "high-precision")}
        results.append(rec)
        rows.append({k: _cell(v) for k, v in rec.items()})
    return rows, results


_RUNNERS = {
    "constants": _run_constants,
    "totient-check": _run_totient_check,
    "bias": _run_bias,
    "titchmarsh": _run_titchmarsh,
    "mellin": _run_mellin,
    "smooth-scan": _run_smooth_scan,
}


def _build_parser() -> _Parser:
    top = _Parser(prog="primebias",
                  description="Prime progression bias verification suites")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="subcommand", required=True,
                             parser_class=_Parser)

    def common(p):
        p.add_argument("--out", choices=("table", "csv", "json"),
                       default="table")
        p.add_argument("--file", default=None,
                       help="write output here (CSV appends)")
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("constants", help="bias constants with tail bounds")
    p.add_argument("--a", type=int, default=1)
    common(p)

    p = sub.add_parser("totient-check",
                       help="totient-sum residual tables and fitted slopes")
    p.add_argument("--a", type=_ints, default=[1])
    p.add_argument("--m-grid", dest="m_grid", type=_floats,
                   default=[100.0, 1000.0, 10000.0, 100000.0, 1000000.0])
    common(p)

    p = sub.add_parser("bias", help="averaged progression error reports")
    p.add_argument("--a", type=_ints, default=[1])
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--m", type=_floats, required=True)
    p.add_argument("--counting", choices=("psi", "theta", "pi"),
                   default="psi")
    p.add_argument("--baseline", choices=("chebyshev", "x_linear"),
                   default="chebyshev")
    p.add_argument("--algo", choices=("direct", "switched", "both"),
                   default="direct")
    common(p)

    p = sub.add_parser("titchmarsh", help="shifted divisor-sum asymptotic")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--x", type=float, required=True)
    common(p)

    p = sub.add_parser("mellin", help="residue and Perron kernel checks")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--m", type=float, default=100.0)
    p.add_argument("--center", choices=("0", "-1", "both"), default="both")
    p.add_argument("--radius", type=float, default=0.25)
    p.add_argument("--kappa", type=float, default=0.3)
    p.add_argument("--y", default="0.5,1,2,10")
    p.add_argument("--T", default="100,1000")
    p.add_argument("--skip-perron", action="store_true")
    common(p)

    p = sub.add_parser("smooth-scan", help="smooth-modulus proportion scan")
    p.add_argument("--x", type=float, default=1e7)
    p.add_argument("--m-grid", dest="m_grid", type=_floats,
                   default=[100.0, 1000.0, 10000.0])
    common(p)
    return top


def _config_echo(args) -> dict:
    skip = {"out", "file", "threads", "subcommand"}
    cfg = {"subcommand": args.subcommand}
    for key, val in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(val, list):
            cfg[key] = [str(_number(v)) if isinstance(v, float) else str(v)
                        for v in val]
        elif isinstance(val, float):
            cfg[key] = str(_number(val))
        elif val is not None:
            cfg[key] = str(val)
    cfg["out"] = args.out
    return cfg


def _emit_table(columns, rows, stream):
    widths = [max(len(c), *(len(r.get(c, "")) for r in rows)) if rows
              else len(c) for c in columns]
    stream.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()
                 + "\n")
    for r in rows:
        stream.write("  ".join(r.get(c, "").ljust(w)
                               for c, w in zip(columns, widths)).rstrip() + "\n")


def _emit(args, rows, results) -> None:
    columns = _CSV_COLUMNS[args.subcommand]
    if args.out == "json":
        doc = {"config": _config_echo(args), "results": results,
               "version": __version__}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if args.file:
            with open(args.file, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    elif args.out == "csv":
        if args.file:
            fresh = not os.path.exists(args.file) \
                or os.path.getsize(args.file) == 0
            with open(args.file, "a", newline="", encoding="utf-8") as fh:
                w = csv.DictWriter(fh, fieldnames=columns)
                if fresh:
                    w.writeheader()
                w.writerows({c: r.get(c, "") for c in columns} for r in rows)
        else:
            w = csv.DictWriter(sys.stdout, fieldnames=columns)
            w.writeheader()
            w.writerows({c: r.get(c, "") for c in columns} for r in rows)
    else:
        if args.file:
            buf = io.StringIO()
            _emit_table(columns, rows, buf)
            with open(args.file, "w", encoding="utf-8") as fh:
                fh.write(buf.getvalue())
        else:
            _emit_table(columns, rows, sys.stdout)


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.threads is not None:
            threads = resolve_threads(args.threads)
        elif "PBL_THREADS" in os.environ:
            threads = resolve_threads(None)
        else:
            threads = os.cpu_count() or 1
        rows, results = _RUNNERS[args.subcommand](args, threads)
        _emit(args, rows, results)
    except NumericError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except DomainError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
