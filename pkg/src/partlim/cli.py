"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 verification or validation failure.
The cache directory comes from ``--cache-dir``, else ``PARTLIM_CACHE_DIR``,
else ``~/.cache/partlim``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from partlim import coeffs, distn, limitlaw, montecarlo, verify

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
CACHE_ENV = "PARTLIM_CACHE_DIR"
SCHEMA = "partlim/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Config:
    cache_dir: Path
    memory_budget: int
    grid_M: int
    iters: int
    fmt: str
    seed: int

    @classmethod
    def from_args(cls, args) -> "Config":
        cache = args.cache_dir or os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "partlim"
        if args.max_len <= 0:
            raise UsageError("--max-len must be positive")
        return cls(Path(cache), args.max_len, limitlaw.DEFAULT_GRID_M, limitlaw.DEFAULT_ITERS,
                   args.format, getattr(args, "seed", 0) or 0)


def fmt_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_decimal(q) -> str:
    return f"{float(q):.12g}"


def _emit(cfg: Config, payload: dict, rows: Optional[list[list]] = None, header: Optional[list[str]] = None):
    if cfg.fmt == "json":
        print(json.dumps({"schema": SCHEMA, **payload}, indent=2))
        return
    if header:
        print(",".join(header))
    for row in rows or []:
        print(",".join(str(v) for v in row))


def _positive_order(args):
    if args.a < 2:
        raise UsageError(f"-a must be >= 2, got {args.a}")
    if args.N < 1:
        raise UsageError(f"-N must be >= 1, got {args.N}")


# -- coeffs --------------------------------------------------------------------


def cmd_coeffs(args, cfg: Config) -> int:
    _positive_order(args)
    table = None
    path = coeffs.cache_path(cfg.cache_dir, args.a, args.N)
    if args.cache and path.exists():
        table = coeffs.read_cache(path)
    if table is None:
        try:
            table = coeffs.expand_coeffs(args.a, args.N, max_len=cfg.memory_budget)
        except coeffs.BudgetExceeded as exc:
            raise UsageError(str(exc)) from None
        if args.cache:
            coeffs.write_cache(table, cfg.cache_dir)
    status = EXIT_OK
    payload = {"a": table.base, "N": table.order, "row": list(table.row)}
    lines = [",".join(str(v) for v in table.row)]

    if args.oracle:
        brute = coeffs.brute_force_coeffs(args.a, args.N)
        verdict = "MATCH" if brute.row == table.row else "MISMATCH"
        payload["oracle"] = verdict
        lines.append(verdict)
        if verdict != "MATCH":
            status = EXIT_FAIL
    if args.oeis:
        if args.a != 2:
            raise UsageError("--oeis is only meaningful for a = 2")
        try:
            pairs = coeffs.read_bfile(args.oeis)
        except coeffs.BFileError as exc:
            raise UsageError(str(exc)) from None
        tables = [coeffs.expand_coeffs(2, n) for n in range(args.first_row, args.N + 1) if n >= 1]
        report = coeffs.oeis_crosscheck(tables, pairs, first_row=args.first_row)
        payload["oeis"] = report.as_dict()
        for r in report.rows:
            lines.append(f"OEIS N={r.order} {r.status} covered={r.covered}/{r.expected_len}"
                         + (f" first_mismatch_k={r.mismatches[0][0]}" if r.mismatches else ""))
        if any(r.status == "mismatch" for r in report.rows):
            status = EXIT_FAIL
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("\n".join(str(v) for v in table.row) + "\n")

    if cfg.fmt == "json":
        _emit(cfg, payload)
    else:
        print("\n".join(lines))
    return status


# -- dist ----------------------------------------------------------------------


def cmd_dist(args, cfg: Config) -> int:
    _positive_order(args)
    if not (args.pmf or args.moments or args.cumulants or args.diagnostics is not None):
        args.moments = True
    payload: dict = {"a": args.a, "N": args.N}
    out: list[str] = []
    if args.pmf:
        try:
            table = coeffs.expand_coeffs(args.a, args.N, max_len=cfg.memory_budget)
        except coeffs.BudgetExceeded as exc:
            raise UsageError(str(exc)) from None
        p = distn.pmf(table)
        payload["pmf"] = [fmt_rational(x) for x in p]
        out.append(",".join(fmt_rational(x) for x in p))
        out.append(",".join(fmt_decimal(x) for x in p))
    if args.moments:
        mean, var = distn.mean_variance(args.a, args.N)
        payload["mean"] = fmt_rational(mean)
        payload["variance"] = fmt_rational(var)
        out += [f"mean,{fmt_rational(mean)},{fmt_decimal(mean)}",
                f"variance,{fmt_rational(var)},{fmt_decimal(var)}"]
    if args.cumulants:
        if args.cumulants < 1:
            raise UsageError("--cumulants needs n_max >= 1")
        seq = distn.standardized_cumulants(args.a, args.N, args.cumulants)
        payload["cumulants"] = {f"kappa_{2 * n}": fmt_rational(k) for n, k in enumerate(seq.even, 1)}
        out += [f"kappa_{2 * n},{fmt_rational(k)},{fmt_decimal(k)}" for n, k in enumerate(seq.even, 1)]
    if args.diagnostics is not None:
        try:
            diag = distn.clt_diagnostics(args.a, args.N, args.diagnostics)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        payload["diagnostics"] = diag.as_dict()
        out += [
            f"feller_ratio,{fmt_rational(diag.feller_ratio)},{fmt_decimal(diag.feller_ratio)}",
            f"lindeberg,{fmt_rational(diag.lindeberg)},{fmt_decimal(diag.lindeberg)}",
            f"uan,{fmt_rational(diag.uan)},{fmt_decimal(diag.uan)}",
            f"max_atom,{fmt_rational(diag.max_atom)},{fmt_decimal(diag.max_atom)}",
        ]
    if cfg.fmt == "json":
        _emit(cfg, payload)
    else:
        print("\n".join(out))
    return EXIT_OK


# -- limit ---------------------------------------------------------------------


def cmd_limit(args, cfg: Config) -> int:
    if args.a < 2:
        raise UsageError(f"-a must be >= 2, got {args.a}")
    status = EXIT_OK
    payload: dict = {"a": args.a}
    out: list[str] = []
    if args.moments:
        methods = ["rec1", "rec2", "rec3"] if args.method == "all" else [args.method]
        if args.a != 2:
            if args.method == "rec3":
                raise UsageError("rec3 is only available for a = 2")
            methods = [m for m in methods if m != "rec3"]
        funcs = {"rec1": limitlaw.moments_rec1, "rec2": limitlaw.moments_rec2,
                 "rec3": limitlaw.moments_rec3}
        cols = {m: funcs[m](args.moments, args.a) for m in methods}
        out.append("n," + ",".join(methods) + ",decimal")
        for n in range(1, args.moments + 1):
            vals = [cols[m][n - 1] for m in methods]
            out.append(f"{2 * n}," + ",".join(fmt_rational(v) for v in vals) + f",{fmt_decimal(vals[0])}")
        payload["moments"] = {m: [fmt_rational(v) for v in c] for m, c in cols.items()}
        if len(methods) > 1:
            agree = all(cols[m] == cols[methods[0]] for m in methods)
            payload["verdict"] = "AGREE" if agree else "DISAGREE"
            out.append(payload["verdict"])
            if not agree:
                status = EXIT_FAIL
    if args.cumulants:
        seq = limitlaw.limit_cumulants(args.a, args.cumulants)
        payload["cumulants"] = {f"kappa_{2 * n}": fmt_rational(k) for n, k in enumerate(seq.even, 1)}
        out += [f"kappa*_{2 * n},{fmt_rational(k)},{fmt_decimal(k)}" for n, k in enumerate(seq.even, 1)]
    if args.profile:
        prof = limitlaw.lyapunov_profile(args.profile, args.a)
        payload["profile"] = prof
        out += [f"lyapunov_{2 * n},{v:.12g}" for n, v in enumerate(prof, 1)]
    if args.density:
        try:
            grid = limitlaw.density_grid(args.a, args.grid, args.iters)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        target = args.out or f"zstar_a{args.a}_M{args.grid}_T{args.iters}.csv"
        csv_path, json_path = grid.write(target)
        payload["density"] = {**grid.metadata(), "csv": csv_path, "json": json_path}
        out.append(f"density,{csv_path},{json_path},integral={grid.integral:.12g},"
                   f"truncation_bound={grid.truncation_bound:.3e}")
    if cfg.fmt == "json":
        _emit(cfg, payload)
    else:
        print("\n".join(out))
    return status


# -- sample --------------------------------------------------------------------


def cmd_sample(args, cfg: Config) -> int:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    try:
        if args.model == "zn":
            _positive_order(args)
            batch = montecarlo.sample_zn_direct(args.a, args.N, args.count, args.seed, args.shards)
        elif args.model == "zn-bernoulli":
            _positive_order(args)
            batch = montecarlo.sample_zn_bernoulli(args.N, args.count, args.seed, a=args.a,
                                                   shards=args.shards)
        else:
            batch = montecarlo.sample_zstar(args.a, args.K, args.count, args.seed, args.shards)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = batch.summary()
    if batch.model == "zstar":
        v = batch.values
        summary["m2"] = float((v**2).mean())
        summary["m4"] = float((v**4).mean())
    if args.out:
        batch.write(args.out)
        summary["out"] = args.out
    if cfg.fmt == "json":
        _emit(cfg, {"summary": summary})
    else:
        for k, v in summary.items():
            print(f"{k},{v:.12g}" if isinstance(v, float) else f"{k},{v}")
    return EXIT_OK


# -- verify --------------------------------------------------------------------


def cmd_verify(args, cfg: Config) -> int:
    report = verify.run(args.suite)
    text = json.dumps(report, indent=2)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="ascii")
    if cfg.fmt == "json":
        print(text)
    else:
        for c in report["checks"]:
            print(f"{c['suite']},{c['name']},{c['status']}")
        print(report["status"])
    return EXIT_OK if report["status"] == "PASS" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="partlim", description="Restricted-partition coefficients and their limit law.")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--max-len", type=int, default=coeffs.DEFAULT_MAX_LEN,
                   help="largest coefficient row to expand")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("coeffs", help="coefficient row for (a, N)")
    c.add_argument("-a", type=int, default=2)
    c.add_argument("-N", type=int, required=True)
    c.add_argument("--oracle", action="store_true", help="compare with tuple enumeration")
    c.add_argument("--oeis", metavar="BFILE", help="cross-check rows 1..N against a b-file")
    c.add_argument("--first-row", type=int, default=1, help="row order at the first b-file index")
    c.add_argument("--out", help="write the row, one integer per line")
    c.add_argument("--cache", action="store_true", help="read/write the coefficient cache")
    c.set_defaults(func=cmd_coeffs)

    d = sub.add_parser("dist", help="exact pmf, moments, cumulants, CLT diagnostics")
    d.add_argument("-a", type=int, default=2)
    d.add_argument("-N", type=int, required=True)
    d.add_argument("--pmf", action="store_true")
    d.add_argument("--moments", action="store_true")
    d.add_argument("--cumulants", type=int, metavar="N_MAX")
    d.add_argument("--diagnostics", type=float, metavar="EPS")
    d.set_defaults(func=cmd_dist)

    lim = sub.add_parser("limit", help="limit law: moments, cumulants, density grid")
    lim.add_argument("-a", type=int, default=2)
    lim.add_argument("--moments", type=int, metavar="N_MAX")
    lim.add_argument("--method", choices=("rec1", "rec2", "rec3", "all"), default="rec1")
    lim.add_argument("--cumulants", type=int, metavar="N_MAX")
    lim.add_argument("--profile", type=int, metavar="N_MAX")
    lim.add_argument("--density", action="store_true")
    lim.add_argument("--grid", type=int, default=limitlaw.DEFAULT_GRID_M)
    lim.add_argument("--iters", type=int, default=limitlaw.DEFAULT_ITERS)
    lim.add_argument("--out", help="density CSV path (JSON sidecar alongside)")
    lim.set_defaults(func=cmd_limit)

    s = sub.add_parser("sample", help="seeded Monte Carlo batches")
    s.add_argument("model", choices=("zn", "zn-bernoulli", "zstar"))
    s.add_argument("-a", type=int, default=2)
    s.add_argument("-N", type=int, default=1)
    s.add_argument("-K", type=int, default=30)
    s.add_argument("-c", "--count", type=int, default=100000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--shards", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", help="run identity/oracle batteries")
    v.add_argument("suite", choices=(*verify.SUITES, "all"))
    v.add_argument("--report", help="also write the JSON report here")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config.from_args(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"partlim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
