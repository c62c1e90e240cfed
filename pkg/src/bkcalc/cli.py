"""Command-line entry point.

Subcommands: ``bounds table|one``, ``ideal analyze``, ``gauss plot``,
``witt mu``, ``newton verify``, ``search``.  Data streams are byte-stable
for fixed inputs and seeds: rationals print exactly as ``a/b``, the version
banner goes to stderr only, and nothing timestamps the output.

Exit status: 0 on success / all-pass, 1 on verification failure, 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .bounds import (
    BoundInputs,
    crystalline_gap_constant,
    rho_bound_chain,
    rho_bound_combined,
    rho_bound_envelope,
    verify_boundedness,
)
from .errors import BKError
from .gauss import comparison_envelope, ideal_profile, stabilization_radius
from .harness import InstanceConfig, replay_rows, run_suite
from .ideals import check_frobenius_conditions, parse_ideal_file
from .newton import verify_mu_valuations
from .witt import mu_expansion, q_table

Q = Fraction


def _fmt_q(x) -> str:
    x = Q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_val(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return _fmt_q(v)
    return str(v)


def _parse_range(text: str) -> list[int]:
    out: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            lo, hi = chunk.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(chunk))
    return out


def _emit_kv(pairs, out) -> None:
    for k, v in pairs:
        print(f"{k}: {_fmt_val(v)}", file=out)


# -- subcommands ----------------------------------------------------------------


def _cmd_bounds(args, out) -> int:
    ps = _parse_range(args.p)
    es = _parse_range(args.e)
    js = _parse_range(args.j)
    if args.mode == "one":
        p, e, j = ps[0], es[0], js[0]
        inp = BoundInputs(p, e, j)
        _emit_kv(
            [
                ("p", p),
                ("e", e),
                ("j", j),
                ("n", inp.n),
                ("sigma_cap", inp.sigma_cap),
                ("arg1", rho_bound_chain(p, e, j)),
                ("arg2", rho_bound_envelope(p, e, j)),
                ("d", rho_bound_combined(p, e, j)),
                ("crys_constant", crystalline_gap_constant(p, e, j)),
            ],
            out,
        )
        return 0
    print("p,e,j,n,arg1,arg2,d,crys_constant", file=out)
    for p in ps:
        for e in es:
            for j in js:
                inp = BoundInputs(p, e, j)
                row = [
                    p, e, j, inp.n,
                    rho_bound_chain(p, e, j),
                    _fmt_q(rho_bound_envelope(p, e, j)),
                    rho_bound_combined(p, e, j),
                    crystalline_gap_constant(p, e, j),
                ]
                print(",".join(str(x) for x in row), file=out)
    return 0


def _cmd_ideal_analyze(args, out) -> int:
    with open(args.file, encoding="utf-8") as fh:
        J = parse_ideal_file(fh.read())
    inv = J.invariants()
    ell = args.ell if args.ell is not None else args.j + 1
    report = verify_boundedness(J, args.j, ell)
    pairs = [
        ("p", J.params.p),
        ("N", J.params.N),
        ("M", J.params.M),
        ("e", J.params.e),
        ("witness", J.witness),
        ("sigma", inv.sigma),
        ("rho", inv.rho),
        ("length", inv.length),
        ("j", args.j),
        ("ell", ell),
        ("scaled_in_frobenius", report.conditions.scaled_in_frobenius),
        ("frobenius_scaled_back", report.conditions.frobenius_scaled_back),
        ("p_exponent", report.p_exponent),
        ("p_power_in_ideal", report.p_power_in_ideal),
        ("length_cap", report.length_cap),
        ("length_within", report.length_within),
        ("corner_exponent", report.corner_exponent),
        ("corner_contained", report.corner_contained),
    ]
    _emit_kv(pairs, out)
    if not report.conditions.scaled_in_frobenius:
        return 1
    if report.applicable and not report.all_pass:
        return 1
    return 0


def _cmd_gauss_plot(args, out) -> int:
    with open(args.file, encoding="utf-8") as fh:
        J = parse_ideal_file(fh.read())
    f = ideal_profile(J)
    sigma = J.invariants().sigma
    p = J.params.p
    rmax = Q(args.rmax) if args.rmax else max(
        [stabilization_radius(p, args.j)] + list(f.breakpoints)
    ) + 1
    h = comparison_envelope(p, sigma, args.j, rmax)
    grid = {Q(0), rmax}
    for k in range(1, args.samples):
        grid.add(Q(k) * rmax / args.samples)
    grid.update(b for b in f.breakpoints if b <= rmax)
    grid.update(b for b in h.breakpoints if b <= rmax)
    print("r,f,h", file=out)
    for r in sorted(grid):
        print(f"{_fmt_q(r)},{_fmt_q(f(r))},{_fmt_q(h(r))}", file=out)
    return 0


def _cmd_witt_mu(args, out) -> int:
    muj = mu_expansion(args.p, args.j, args.levels)
    print("index,valuation,known_below", file=out)
    for i, c in enumerate(muj.coords):
        v = c.valuation()
        val = _fmt_q(v) if v is not None else "infinity"
        cut = _fmt_q(c.cutoff) if c.cutoff is not None else "exact"
        print(f"{i},{val},{cut}", file=out)
    return 0


def _cmd_newton_verify(args, out) -> int:
    report = verify_mu_valuations(args.p, args.j, args.lmax)
    if args.format == "csv":
        print("index,computed,expected", file=out)
        for row in report.rows:
            print(f"{row.index},{_fmt_q(row.computed)},{_fmt_q(row.expected)}", file=out)
    else:
        print(f"mu-power valuation check  p={report.p} j={report.j} lmax={report.ell_max}", file=out)
        for row in report.rows:
            mark = "pass" if row.passed else "FAIL"
            print(
                f"  ell={row.ell} index={row.index:3d}  computed={_fmt_q(row.computed):>10s}"
                f"  expected={_fmt_q(row.expected):>10s}  {mark}",
                file=out,
            )
        _emit_kv(
            [
                ("polygon_scaling_consistent", report.scaling_consistent),
                ("index_convention", report.index_convention),
                ("all_pass", report.all_pass),
            ],
            out,
        )
    return 0 if report.all_pass else 1


def _cmd_search(args, out) -> int:
    if args.replay:
        with open(args.replay, encoding="utf-8") as fh:
            result = replay_rows(fh)
    else:
        configs = []
        for p in _parse_range(args.p):
            for e in _parse_range(args.e):
                for j in _parse_range(args.j):
                    configs.append(
                        InstanceConfig(
                            p=p, e=e, j=j,
                            ell=args.ell,
                            count=args.count,
                            seed=args.seed,
                            N=args.precision_N,
                            M=args.precision_M,
                        )
                    )
        result = run_suite(configs)
    for row in result.rows:
        print(json.dumps(row, separators=(",", ":")), file=out)
    print(json.dumps({"summary": result.summary}, separators=(",", ":")), file=out)
    if result.summary.get("inconclusive"):
        print("warning: some rows were inconclusive; raise precision", file=sys.stderr)
    return 1 if result.failures else 0


# -- dispatch ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="bkcalc", description=__doc__)
    top.add_argument("--seed", type=int, default=0)
    top.add_argument("--precision-N", type=int, default=None, dest="precision_N")
    top.add_argument("--precision-M", type=int, default=None, dest="precision_M")
    top.add_argument("--format", choices=("text", "csv", "jsonl"), default="text")
    sub = top.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="bound tables for rho and the crystalline gap")
    b.add_argument("mode", choices=("table", "one"))
    b.add_argument("--p", required=True)
    b.add_argument("--e", required=True)
    b.add_argument("--j", required=True)

    i = sub.add_parser("ideal", help="analyze an ideal spec file")
    i.add_argument("mode", choices=("analyze",))
    i.add_argument("--file", required=True)
    i.add_argument("--j", type=int, required=True)
    i.add_argument("--ell", type=int, default=None)

    g = sub.add_parser("gauss", help="emit (r, f, h) samples for plotting")
    g.add_argument("mode", choices=("plot",))
    g.add_argument("--file", required=True)
    g.add_argument("--j", type=int, required=True)
    g.add_argument("--rmax", default=None)
    g.add_argument("--samples", type=int, default=16)

    w = sub.add_parser("witt", help="Teichmuller expansion of mu^j")
    w.add_argument("mode", choices=("mu",))
    w.add_argument("--p", type=int, required=True)
    w.add_argument("--j", type=int, required=True)
    w.add_argument("--levels", type=int, required=True)

    n = sub.add_parser("newton", help="verify mu-power valuations and polygon scaling")
    n.add_argument("mode", choices=("verify",))
    n.add_argument("--p", type=int, required=True)
    n.add_argument("--j", type=int, required=True)
    n.add_argument("--lmax", type=int, required=True)

    s = sub.add_parser("search", help="generate and verify containment instances")
    s.add_argument("--p", default="2,3,5")
    s.add_argument("--e", default="1..6")
    s.add_argument("--j", default="1..3")
    s.add_argument("--ell", type=int, default=None)
    s.add_argument("--count", type=int, default=200)
    s.add_argument("--replay", default=None)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    print(f"bkcalc {__version__}", file=sys.stderr)
    out = sys.stdout
    try:
        if args.command == "bounds":
            return _cmd_bounds(args, out)
        if args.command == "ideal":
            return _cmd_ideal_analyze(args, out)
        if args.command == "gauss":
            return _cmd_gauss_plot(args, out)
        if args.command == "witt":
            return _cmd_witt_mu(args, out)
        if args.command == "newton":
            return _cmd_newton_verify(args, out)
        if args.command == "search":
            return _cmd_search(args, out)
    except BKError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
