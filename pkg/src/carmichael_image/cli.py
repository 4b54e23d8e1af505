"""Command-line front end.

Data records go to stdout (JSON lines by default, CSV with ``--format csv``);
diagnostics go to stderr.  Exit codes: 0 success, 2 usage, 3 ``member`` on a
non-value, 4 range/overflow, 5 corrupt series file, 1 checkpoint write failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass
from math import isqrt
from typing import Sequence

from . import analytics, construction, engine
from .arith import DEFAULT_TABLE_CEILING, build_tables, carmichael_lambda, euler_phi
from .errors import (
    ArithmeticOverflow,
    ComplexityError,
    ConfigurationError,
    CorruptSeriesError,
    DomainError,
    RangeError,
    SinkError,
)
from .oracle import max_lambda_divisor, max_witness
from .series import SeriesWriter, read_series

EXIT_OK, EXIT_USAGE, EXIT_NOT_MEMBER, EXIT_RANGE, EXIT_CORRUPT = 0, 2, 3, 4, 5
DEFAULT_SEED = 20240101

log = logging.getLogger("carmichael_image")


@dataclass
class RunConfig:
    threads: int = os.cpu_count() or 1
    segment_size: int = engine.DEFAULT_SEGMENT_SIZE
    limit: int | None = None
    format: str = "json"
    output: str | None = None
    resume: str | None = None

    def validate(self) -> None:
        if self.threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        if self.segment_size < engine.MIN_SEGMENT_SIZE:
            raise ConfigurationError(f"--segment-size must be >= {engine.MIN_SEGMENT_SIZE}")
        if self.format not in ("json", "csv"):
            raise ConfigurationError(f"unknown format {self.format}")


class _Out:
    """Emits rows as JSON objects or CSV lines with a header on first use."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self._csv = None

    def row(self, obj: dict) -> None:
        if self.fmt == "json":
            self.stream.write(json.dumps(obj) + "\n")
        else:
            flat = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in obj.items()}
            if self._csv is None:
                self._csv = csv.DictWriter(self.stream, fieldnames=list(flat), lineterminator="\n")
                self._csv.writeheader()
            self._csv.writerow(flat)
        self.stream.flush()


def _tables_for(n: int, need_upto: int | None = None):
    """Tables able to factor n and test primality up to ``need_upto``."""
    target = max(need_upto or 0, isqrt(n) + 1, 1000)
    limit = min(target, DEFAULT_TABLE_CEILING)
    if limit * limit < max(n, need_upto or 0):
        raise RangeError(f"{n} is beyond what tables to {DEFAULT_TABLE_CEILING} can handle")
    return build_tables(limit)


def _positive_int(text: str) -> int:
    try:
        v = int(text.replace("_", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def cmd_lambda(args, out: _Out) -> int:
    t = _tables_for(args.n)
    out.row({"n": args.n, "lambda": carmichael_lambda(args.n, t)})
    return EXIT_OK


def cmd_phi(args, out: _Out) -> int:
    t = _tables_for(args.n)
    out.row({"n": args.n, "phi": euler_phi(args.n, t)})
    return EXIT_OK


def cmd_member(args, out: _Out) -> int:
    t = _tables_for(args.n, args.n + 1)
    prof = max_lambda_divisor(args.n, t)
    rec = {"n": args.n, "is_value": prof.is_value, "L": prof.L}
    if args.witness:
        w = max_witness(args.n, t)
        rec["witness_factorization"] = [[p, e] for p, e in w.factors]
        rec["witness"] = str(w)
    out.row(rec)
    return EXIT_OK if prof.is_value else EXIT_NOT_MEMBER


def cmd_count(args, out: _Out) -> int:
    cfg = RunConfig(threads=args.threads, segment_size=args.segment_size, limit=args.limit,
                    format=args.format, output=args.out, resume=args.resume)
    cfg.validate()
    start = engine.resume(cfg.resume) if cfg.resume else None
    out_path = cfg.output or cfg.resume
    writer = SeriesWriter(out_path, start.series if start else None) if out_path else None

    def sink(cp):
        if writer is not None:
            writer(cp)
        out.row({"x": cp.x, "v_lambda": cp.v_lambda, "eta_hat": cp.eta_hat,
                 "wall_seconds": cp.wall_seconds} if cfg.format == "csv" else cp.to_record())

    try:
        engine.count_up_to(cfg.limit, args.checkpoints or (), cfg.threads, cfg.segment_size,
                           sink, start=start)
    finally:
        if writer is not None:
            writer.close()
    return EXIT_OK


def _rep_record(rep) -> dict:
    return {"a": list(rep.a), "b": list(rep.b), "B": list(rep.B), "q": list(rep.q)}


def cmd_reps(args, out: _Out) -> int:
    t = _tables_for(args.n, args.n + 1)
    params = construction.params_for(max(args.n, 16), args.k, y=args.y, l=args.l,
                                     relaxed=args.relax)
    r, reps = construction.find_representations(args.n, params, args.max, t)
    if params.degenerate and not args.relax:
        log.warning("parameters are degenerate at this scale (y=%.4g, l=%d)", params.y, params.l)
    out.row({"n": args.n, "k": args.k, "relaxed": args.relax, "y": params.y, "l": params.l,
             "degenerate": params.degenerate, "r": r,
             "representations": [_rep_record(rp) for rp in reps]})
    return EXIT_OK


def cmd_s1s2(args, out: _Out) -> int:
    t = _tables_for(args.x, args.x + 1)
    params = construction.params_for(max(args.x, 16), args.k, relaxed=args.relax)
    rep = construction.empirical_s1_s2(args.x, args.k, params, t)
    out.row({"x": args.x, "k": args.k, "relaxed": args.relax, "S1": rep.S1, "S2": rep.S2,
             "positive_count": rep.positive_count, "cauchy_bound": float(rep.cauchy_bound),
             "cauchy_holds": rep.cauchy_holds})
    return EXIT_OK


def cmd_constants(args, out: _Out) -> int:
    rows = analytics.beta_convergence(args.k_max)
    if args.format == "csv":
        out.row({"name": "eta", "k": "", "value": analytics.ETA, "minus_eta": ""})
        out.row({"name": "alpha", "k": "", "value": analytics.ALPHA, "minus_eta": ""})
        out.row({"name": "lp_lower_exponent", "k": "", "value": analytics.LP_LOWER_EXPONENT,
                 "minus_eta": ""})
        for k, b, gap in rows:
            out.row({"name": "beta", "k": k, "value": b, "minus_eta": gap})
    else:
        out.row({"eta": analytics.ETA, "alpha": analytics.ALPHA,
                 "lp_lower_exponent": analytics.LP_LOWER_EXPONENT,
                 "beta": [{"k": k, "beta": b, "minus_eta": gap} for k, b, gap in rows]})
    return EXIT_OK


def cmd_lemma1(args, out: _Out) -> int:
    r = analytics.lemma1_ratio(args.x, args.h)
    out.row({"x": r.x, "h": r.h, "exact_sum": r.exact_sum, "reference": r.reference,
             "ratio": r.ratio})
    return EXIT_OK


def cmd_fit(args, out: _Out) -> int:
    series = read_series(args.infile)
    for x, v, e in analytics.exponent_fit(series):
        out.row({"x": x, "v_lambda": v, "eta_hat": e})
    return EXIT_OK


def cmd_multtable(args, out: _Out) -> int:
    c = analytics.mult_table_count(args.n)
    out.row({"n": args.n, "count": c, "exponent": analytics.mult_table_exponent(args.n, c)})
    return EXIT_OK


def cmd_phicount(args, out: _Out) -> int:
    c = analytics.phi_image_count(args.limit)
    out.row({"x": args.limit, "v_phi": c})
    return EXIT_OK


def cmd_omegadist(args, out: _Out) -> int:
    t = build_tables(max(args.limit, 2))
    r = analytics.omega_distribution(args.limit, t)
    out.row({"x": r.x, "mean_omega_image": r.mean_omega_image,
             "mean_omega_all": r.mean_omega_all, "reference": r.reference})
    return EXIT_OK


def cmd_dual(args, out: _Out) -> int:
    ok = construction.b_v_identity_check(args.k, args.m, args.trials, seed=args.seed)
    out.row({"k": args.k, "m": args.m, "omega": args.omega,
             "formula": construction.dual_count_formula(args.k, args.m, args.omega),
             "bruteforce": construction.dual_count_bruteforce(args.k, args.m, args.omega),
             "b_v_identity": ok, "seed": args.seed})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carmichael-image",
                                description="Carmichael lambda values: membership, counts, constructions.")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lambda", help="print lambda(n)")
    s.add_argument("n", type=_positive_int)
    s.set_defaults(func=cmd_lambda)
    s = sub.add_parser("phi", help="print phi(n)")
    s.add_argument("n", type=_positive_int)
    s.set_defaults(func=cmd_phi)

    s = sub.add_parser("member", help="decide whether n is a value of lambda")
    s.add_argument("n", type=_positive_int)
    s.add_argument("--witness", action="store_true")
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("count", help="count lambda-values up to X")
    s.add_argument("--limit", type=_positive_int, required=True)
    s.add_argument("--checkpoints", type=_int_list, default=None)
    s.add_argument("--segment-size", type=_positive_int, default=engine.DEFAULT_SEGMENT_SIZE)
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--out")
    s.add_argument("--resume")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("reps", help="representations of n via k shifted primes")
    s.add_argument("n", type=_positive_int)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--relax", action="store_true")
    s.add_argument("--max", type=int, default=10)
    s.add_argument("--y", type=float, default=None, help="override the smoothness threshold")
    s.add_argument("--l", type=int, default=None, help="override the per-part prime count")
    s.set_defaults(func=cmd_reps)

    s = sub.add_parser("s1s2", help="first and second moments of r(n)")
    s.add_argument("--x", type=_positive_int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--relax", action="store_true")
    s.set_defaults(func=cmd_s1s2)

    s = sub.add_parser("constants", help="eta, alpha and the beta_k table")
    s.add_argument("--k-max", type=int, default=30)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("lemma1", help="symmetric prime-reciprocal sum vs (log log x)^h / h!")
    s.add_argument("--x", type=_positive_int, required=True)
    s.add_argument("--h", type=int, required=True)
    s.set_defaults(func=cmd_lemma1)

    s = sub.add_parser("fit", help="exponent estimates from a series file")
    s.add_argument("--in", dest="infile", required=True)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("multtable", help="distinct entries of the n x n multiplication table")
    s.add_argument("--n", type=_positive_int, required=True)
    s.set_defaults(func=cmd_multtable)
    s = sub.add_parser("phicount", help="number of distinct totient values <= X")
    s.add_argument("--limit", type=_positive_int, required=True)
    s.set_defaults(func=cmd_phicount)
    s = sub.add_parser("omegadist", help="mean omega over lambda-values vs all integers")
    s.add_argument("--limit", type=_positive_int, required=True)
    s.set_defaults(func=cmd_omegadist)

    s = sub.add_parser("dual", help="dual-factorization count and the B_v identity check")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--omega", type=int, default=2)
    s.add_argument("--trials", type=int, default=7)
    s.set_defaults(func=cmd_dual)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    out = _Out(args.format)
    try:
        return args.func(args, out)
    except CorruptSeriesError as exc:
        print(f"error: corrupt series file: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (RangeError, ArithmeticOverflow, DomainError, ComplexityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except SinkError as exc:
        print(f"error: {exc}; the series file can be resumed", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
