"""Command-line front end: ``rankopt fit`` and ``rankopt cells``.

Input is a delimited text file whose first column is y and whose remaining
columns are the rows of X (comma, tab or whitespace separated; an optional
header line is skipped).  Numbers are read exactly: ``0.1`` is 1/10.

Exit codes: 0 ok, 1 unbounded (a valid answer), 2 input error, 3 internal
invariant failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from decimal import Context, Decimal
from fractions import Fraction

from . import __version__
from .arrangement import build_hyperplanes, count_neighbors, enumerate_cells, segments_2d, zeta
from .ccc_solver import minimize_ccc
from .errors import (
    DegenerateDirection,
    InternalInvariant,
    OracleImpure,
    PrecisionExhausted,
    RankOptError,
    SnapFailed,
)
from .exact_numeric import as_fraction
from .gen_solver import minimize_gen, minimize_gen_bruteforce
from .model import Dataset, score_coefficients, score_oracle, validate

EXIT_OK, EXIT_UNBOUNDED, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
_INTERNAL = (InternalInvariant, SnapFailed, OracleImpure, PrecisionExhausted, DegenerateDirection)
_DEC = Context(prec=30)

log = logging.getLogger("rankopt")


class InputError(RankOptError, ValueError):
    pass


# -- parsing -----------------------------------------------------------------


def _split(line: str) -> list:
    if "," in line:
        return next(csv.reader([line]))
    if "\t" in line:
        return line.split("\t")
    return line.split()


def _number(tok: str, where: str) -> Fraction:
    try:
        return as_fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: cannot read {tok.strip()!r} as a rational number") from None


def read_dataset(text: str) -> Dataset:
    rows = []
    lines = [(k + 1, ln) for k, ln in enumerate(text.splitlines()) if ln.strip() and not ln.lstrip().startswith("#")]
    for pos, (lineno, line) in enumerate(lines):
        cells = [c for c in _split(line.strip()) if c.strip()]
        if pos == 0:
            try:
                [as_fraction(c) for c in cells]
            except (ValueError, ZeroDivisionError):
                continue  # header
        rows.append([_number(c, f"line {lineno}") for c in cells])
    if not rows:
        raise InputError("no data rows")
    width = len(rows[0])
    if width < 2:
        raise InputError("need a y column and at least one X column")
    for k, row in enumerate(rows):
        if len(row) != width:
            raise InputError(f"data row {k + 1} has {len(row)} columns, expected {width}")
    return Dataset([r[1:] for r in rows], [r[0] for r in rows])


def read_coefficient_table(text: str, n: int) -> dict:
    """``"pi_1 ... pi_n | a_1 ... a_n"`` lines (1-based pi) -> {0-based pi: a}."""
    table = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "|" not in line:
            raise InputError(f"coefficient line {lineno}: missing '|'")
        left, right = line.split("|", 1)
        try:
            pi = tuple(int(v) - 1 for v in left.split())
        except ValueError:
            raise InputError(f"coefficient line {lineno}: bad permutation") from None
        if sorted(pi) != list(range(n)):
            raise InputError(f"coefficient line {lineno}: not a permutation of 1..{n}")
        a = [_number(v, f"coefficient line {lineno}") for v in right.split()]
        if len(a) != n:
            raise InputError(f"coefficient line {lineno}: expected {n} coefficients")
        if pi in table and table[pi] != a:
            raise InputError(f"coefficient line {lineno}: permutation listed twice")
        table[pi] = a
    return table


def _table_oracle(table: dict):
    def oracle(pi):
        try:
            return table[tuple(pi)]
        except KeyError:
            raise InputError("coefficient table has no entry for permutation "
                             + " ".join(str(i + 1) for i in pi)) from None
    return oracle


# -- rendering ---------------------------------------------------------------


def rational(q) -> dict:
    q = Fraction(q)
    exact = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    dec = _DEC.divide(Decimal(q.numerator), Decimal(q.denominator))
    return {"exact": exact, "decimal": format(dec, "f") if abs(dec.adjusted()) < 25 else str(dec)}


def _vector(v) -> list:
    return None if v is None else [rational(x) for x in v]


def _emit(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


# -- commands ----------------------------------------------------------------


def _load(args) -> Dataset:
    try:
        with open(args.data, encoding="utf-8") as fh:
            ds = read_dataset(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {args.data}: {exc.strerror}") from None
    validate(ds)
    return ds


def cmd_fit(args, out) -> int:
    ds = _load(args)
    result = {"method": args.method, "n": ds.n, "p": ds.p}
    if args.coeffs:
        if args.method == "ccc":
            raise InputError("--coeffs needs --method gen or brute (ccc uses scores)")
        with open(args.coeffs, encoding="utf-8") as fh:
            oracle = _table_oracle(read_coefficient_table(fh.read(), ds.n))
        result["coefficients"] = {"table": args.coeffs}
        alpha = None
    else:
        alpha = score_coefficients(args.score, ds.n, args.precision)
        oracle = score_oracle(alpha)
        result["coefficients"] = {"score": args.score, "alpha": _vector(alpha)}

    if args.method == "ccc":
        sol = minimize_ccc(ds, alpha, fast=args.fast, precision=args.precision)
        result.update(
            status=sol.status,
            t0=None if sol.t0 is None else rational(sol.t0),
            beta0=_vector(sol.beta0),
            face_rows=[{"pair": [i + 1, j + 1], "w": _vector(w), "z": rational(zv)}
                       for (i, j), w, zv in zip(sol.face_pairs, sol.W, sol.z)],
            statistics=sol.stats,
            bounds={k: getattr(sol.bounds, k) for k in ("L", "q_L", "q1_L", "q2_L", "q3_L", "fast")},
        )
    else:
        if args.method == "gen":
            sol = minimize_gen(ds, oracle, seed=args.seed)
        else:
            sol = minimize_gen_bruteforce(ds, oracle)
        result.update(
            status=sol.status,
            t0=None if sol.value is None else rational(sol.value),
            beta0=_vector(sol.minimizer),
            cell=None if sol.pi is None else [i + 1 for i in sol.pi],
            statistics=sol.stats,
        )
    _emit(result, out)
    return EXIT_UNBOUNDED if result["status"] == "unbounded" else EXIT_OK


def cmd_cells(args, out) -> int:
    ds = _load(args)
    if args.plot2d and ds.p != 2:
        raise InputError("--plot2d needs exactly two X columns")
    arr = build_hyperplanes(ds)

    def sink(pi, witness):
        rec = {"cell": [i + 1 for i in pi], "witness": _vector(witness),
               "neighbors": count_neighbors(arr, pi, witness)}
        out.write(json.dumps(rec) + "\n")

    stats = enumerate_cells(arr, sink, seed=args.seed)
    if args.plot2d:
        for (i, j), (a, b) in segments_2d(arr):
            out.write(json.dumps({"segment": [i + 1, j + 1], "from": _vector(a), "to": _vector(b)}) + "\n")
    out.write(json.dumps({"statistics": {
        "cells": stats.cells, "tightness_lps": stats.lps, "max_depth": stats.max_depth,
        "hyperplanes": len(arr.classes()), "redundant": sorted([i + 1, j + 1] for i, j in arr.redundant),
        "zeta_bound": zeta(len(arr.classes()), ds.p)}}) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rankopt", description="Exact rank-based regression fits.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("data", help="delimited file: y, x_1, ..., x_p per line")
    common.add_argument("--seed", type=int, default=0, help="perturbation seed for the start point")
    common.add_argument("--output", choices=["json"], default="json", help="output format")
    common.add_argument("-v", "--verbose", action="store_true")

    fit = sub.add_parser("fit", parents=[common], help="minimize the rank objective")
    fit.add_argument("--method", choices=["ccc", "gen", "brute"], default="ccc")
    fit.add_argument("--score", choices=["sign", "wilcoxon", "vdw"], default="wilcoxon")
    fit.add_argument("--coeffs", metavar="FILE", help="permutation-keyed coefficient table")
    fit.add_argument("--precision", type=int, default=64, metavar="BITS",
                     help="score rationalization bits; also the minimum ellipsoid mantissa")
    fit.add_argument("--fast", action="store_true", help="smaller bounds with a verified fallback")
    fit.set_defaults(func=cmd_fit)

    cells = sub.add_parser("cells", parents=[common], help="list the cells of the arrangement")
    cells.add_argument("--plot2d", action="store_true", help="also emit clipped line segments (p=2)")
    cells.set_defaults(func=cmd_cells)
    return ap


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except _INTERNAL as exc:
        print(f"rankopt: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (RankOptError, ValueError) as exc:
        print(f"rankopt: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
