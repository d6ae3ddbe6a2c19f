"""Command-line interface.

Subcommands: gauss, kloosterman, bessel, central-check, lemmas, induce,
verify, suite.  Exact values print in the canonical zeta-basis together with
their float shadows.  Exit codes for `verify`: 0 all sums vanish (or sit below
tolerance), 1 a violation was found, 2 a precondition failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from fqlab import __version__
from fqlab._backend import BACKEND
from fqlab.field import factorize, make_tower


def _tower_args(parser, max_ext_default=1):
    parser.add_argument("--q", type=int, help="field size (prime power)")
    parser.add_argument("--p", type=int, help="characteristic (with --e)")
    parser.add_argument("--e", type=int, default=1, help="base degree, q = p^e")
    parser.add_argument("--max-ext", type=int, default=max_ext_default,
                        help="largest extension degree in the tower")


def _build_tower(args, max_ext=None):
    if args.q is not None:
        fac = factorize(args.q)
        if len(fac) != 1:
            raise SystemExit(f"q = {args.q} is not a prime power")
        (p, e), = fac.items()
    elif args.p is not None:
        p, e = args.p, args.e
    else:
        raise SystemExit("give --q or --p/--e")
    return make_tower(p, e=e, max_ext=max_ext or args.max_ext)


def _weights(arg: str, n: int):
    from fqlab.torus import (WeightData, det_twisted_weights, standard_weights,
                             sym2_weights)
    named = {"standard": standard_weights, "sym2": sym2_weights,
             "det-twisted": det_twisted_weights,
             "det_twisted": det_twisted_weights}
    if arg in named:
        return named[arg](n)
    if os.path.exists(arg):
        rho = WeightData.from_file(arg)
    else:
        rho = WeightData.parse(arg)
    if rho.n != n:
        raise SystemExit(f"weight rows have length {rho.n}, expected n = {n}")
    return rho


def _print_value(label, value):
    z = complex(value)
    print(f"{label} = {value}")
    print(f"{label} (float) = {z.real:+.12f} {z.imag:+.12f}i")


def _cmd_gauss(args):
    from fqlab.charsum import AddChar, MultChar, gauss_sum
    tower = _build_tower(args)
    level = args.level
    chi = MultChar(tower, level, args.chi)
    psi = AddChar(tower, level)
    _print_value(f"g(chi_{args.chi}, psi) over F_{tower.q ** level}",
                 gauss_sum(chi, psi))
    return 0


def _cmd_kloosterman(args):
    from fqlab.charsum import kloosterman
    tower = _build_tower(args)
    a = tower.from_int(args.a) if args.a else tower.zero
    _print_value(f"Kl({args.a}) over F_{tower.q ** args.level}",
                 kloosterman(tower, a, args.level))
    return 0


def _cmd_bessel(args):
    from fqlab.torus import bessel_function
    tower = _build_tower(args, max_ext=1)
    rho = _weights(args.weights, args.n)
    f = bessel_function(tower, rho,
                        mode="float" if args.fast else "exact")
    for point in f.points():
        v = f.at(point)
        z = complex(v)
        print(f"phi{point} = {v}" if not args.fast
              else f"phi{point} = {z.real:+.9f} {z.imag:+.9f}i")
    return 0


def _cmd_central_check(args):
    from fqlab.weyl import centrality_check, gamma_datum
    tower = _build_tower(args, max_ext=args.n)
    rho = _weights(args.weights, args.n)
    datum = gamma_datum(tower, rho, "float" if args.fast else "exact")
    report = centrality_check(datum, args.mode)
    print(report.summary())
    if args.out:
        payload = {
            "n": report.n, "q": report.q, "mode": report.mode,
            "passed": report.passed,
            "cells": [{"chi": list(r.chi), "w": list(r.w.images),
                       "ok": r.ok} for r in report.records],
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
    return 0 if report.passed else 1


def _cmd_lemmas(args):
    from fqlab.matrix import verify_structure_lemmas
    rep = verify_structure_lemmas(args.n, args.q,
                                  exhaustive=not args.samples,
                                  samples=args.samples or 200, seed=args.seed)
    print(rep.summary())
    for name, info in sorted(rep.checks.items()):
        print(f"  {name}: {'ok' if info['ok'] else 'FAIL'} {info}")
    return 0 if rep.passed else 1


def _parse_matrix(text: str, fq, n: int):
    from fqlab.matrix import MatrixGL
    rows = [[int(v) % fq.q for v in row.split(",")]
            for row in text.split(";")]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise SystemExit(f"need an {n}x{n} matrix")
    return MatrixGL(fq, rows)


def _cmd_induce(args):
    from fqlab.induce import build_phi, conjugacy_classes
    from fqlab.matrix import Fq
    from fqlab.weyl import gamma_datum
    tower = _build_tower(args, max_ext=args.n)
    rho = _weights(args.weights, args.n)
    datum = gamma_datum(tower, rho, "float" if args.fast else "exact")
    fq = Fq(tower)
    datum._fq = fq
    phi = build_phi(datum)
    if args.at:
        g = _parse_matrix(args.at, fq, args.n)
        if not g.is_invertible():
            raise SystemExit("matrix is singular")
        _print_value("Phi(g)", phi.at(g))
        return 0
    import csv
    rows = []
    for cls in conjugacy_classes(fq, args.n):
        v = phi.at(cls.rep)
        z = complex(v)
        fp = "|".join(f"{list(f)}:{list(lam)}" for f, lam in cls.fingerprint)
        rows.append([fp, str(v), f"{z.real:+.9f}{z.imag:+.9f}i", cls.size])
    writer = csv.writer(sys.stdout if not args.out else open(args.out, "w",
                                                             newline=""))
    writer.writerow(["class", "exact", "float", "size"])
    writer.writerows(rows)
    return 0


def _cmd_verify(args):
    from fqlab.verify import (BudgetExceeded, NotCentral, VerifyConfig,
                              verify_mirabolic, verify_vanishing)
    orbit = tuple(int(v) for v in args.orbit.split(",")) if args.orbit else None
    weights = None if orbit else _weights(args.weights or "standard", args.n)
    cfg = VerifyConfig(
        n=args.n, q=args.q, weights=weights, orbit=orbit,
        mode="float" if args.fast else "exact",
        max_cosets=args.max_cosets, seed=args.seed, out=args.out,
        force=args.force, workers=args.workers)
    try:
        report = (verify_mirabolic if args.mirabolic else verify_vanishing)(cfg)
    except (NotCentral, BudgetExceeded) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 2
    print(report.summary())
    if args.csv:
        report.write_csv(args.csv)
    return 0 if report.passed else 1


def _cmd_suite(args):
    from fqlab.verify import ConfigError, run_suite
    try:
        summary = run_suite(args.config, args.out, fast=args.fast)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for item in summary["checks"]:
        tag = "PASS" if item["passed"] else ("FAIL" if item["gating"]
                                             else "fail (non-gating)")
        print(f"[{tag}] {item['name']} ({item['elapsed_ms']} ms)")
    print(f"{summary['failed']} gating failure(s)")
    return 0 if summary["failed"] == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fqlab",
        description="Finite-field harmonic analysis lab "
                    f"(v{__version__}, {BACKEND} kernels)")
    parser.add_argument("--version", action="version",
                        version=f"fqlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gauss", help="exact Gauss sum")
    _tower_args(p, max_ext_default=1)
    p.add_argument("--chi", type=int, required=True,
                   help="character exponent k mod q^level - 1")
    p.add_argument("--level", type=int, default=1)
    p.set_defaults(fn=_cmd_gauss)

    p = sub.add_parser("kloosterman", help="exact Kloosterman sum")
    _tower_args(p, max_ext_default=1)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--level", type=int, default=1)
    p.set_defaults(fn=_cmd_kloosterman)

    p = sub.add_parser("bessel", help="Bessel function table on T(F_q)")
    _tower_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", required=True,
                   help='rows "1,0;0,1", a file, or standard|sym2|det-twisted')
    p.add_argument("--fast", action="store_true", help="float mode")
    p.set_defaults(fn=_cmd_bessel)

    p = sub.add_parser("central-check", help="centrality of the gamma datum")
    _tower_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--mode", choices=["wchi", "wchiprime"], default="wchi")
    p.add_argument("--fast", action="store_true")
    p.add_argument("--out", help="write the cell report as JSON")
    p.set_defaults(fn=_cmd_central_check)

    p = sub.add_parser("lemmas", help="mirabolic structure lemma checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true", default=None,
                   help="(default for n <= 3)")
    p.add_argument("--samples", type=int, help="sampled mode")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_lemmas)

    p = sub.add_parser("induce", help="the invariant-summand class function")
    _tower_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--at", help='evaluate at one matrix "a,b;c,d"')
    p.add_argument("--table", action="store_true",
                   help="dump values on class representatives as CSV")
    p.add_argument("--out", help="CSV output path (with --table)")
    p.add_argument("--fast", action="store_true")
    p.set_defaults(fn=_cmd_induce)

    p = sub.add_parser("verify", help="coset-sum vanishing sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--weights", help='gamma datum weights (default "standard")')
    p.add_argument("--orbit", help='orbit datum from a seed character "a,b"')
    p.add_argument("--mirabolic", action="store_true")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", default=True)
    group.add_argument("--fast", action="store_true")
    p.add_argument("--max-cosets", type=int, dest="max_cosets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force", action="store_true",
                   help="bypass the centrality precondition")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--csv", help="CSV export path")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("suite", help="run the named check suite")
    p.add_argument("--config", help="JSON suite configuration")
    p.add_argument("--out", help="directory for per-check reports")
    p.add_argument("--fast", action="store_true")
    p.set_defaults(fn=_cmd_suite)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
