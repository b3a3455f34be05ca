"""Command-line front end.

Each subcommand runs one computation and writes a single report, JSON by
default or CSV for the table-producing subcommands.  ``--verify`` also runs
the independent oracle for that computation and exits with status 3 if any
comparison misses its tolerance.  Invalid input exits with status 2.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .deltas import (
    DELTA_GRID,
    DeltaComb,
    comb_gram_form,
    comb_inner_hminus1,
    comb_spectrum,
    phi_norm_diff,
    phi_norm_diff_gram,
    phi_norm_sq,
    phi_norm_sq_gram,
)
from .errors import HsExtError
from .extension import (
    IntervalDomain,
    delta_interval_norm_sq,
    oracle_minimize_h1,
    project_Qminus1,
    project_Qminus_m,
)
from .interval import (
    IntervalFunction,
    h1_interval_norm_sq,
    h1_minimal_extension,
    h2_extension_family_min,
    h2_interval_norm_sq,
    piecewise_h1_inner,
    stationarity_probe,
)
from .report import Check, RunReport, to_csv, to_json
from .spectral import (
    bump,
    fourier_transform,
    hs_inner_report,
    make_grid,
    physical_inner_hm,
)
from .unitarity import CHI_GRID, chi_scan, dichotomy_report, restriction_norm_gap

OUTPUT_DIR_ENV = "HSEXT_OUTPUT_DIR"
TABLE_COMMANDS = ("phi-seq", "chi-scan", "dichotomy")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _comb(points, weights) -> DeltaComb:
    if weights is not None and len(weights) != len(points):
        raise HsExtError("--weights must match the number of delta locations")
    return DeltaComb.from_points(points, weights)


def _comb_inputs(comb: DeltaComb) -> list:
    return [[a.location, a.weight] for a in comb.atoms]


def _grid_args(args, default):
    if args.xi is None and args.n is None:
        return default
    return make_grid(args.xi if args.xi is not None else default.half_width,
                     args.n if args.n is not None else default.num_points)


# --- subcommands -----------------------------------------------------------

def cmd_norm(args) -> RunReport:
    s = args.s
    inputs = {"s": s}
    checks = []
    diag = {}
    if args.zero:
        inputs["input"] = "zero"
        norm_sq = 0.0
        checks.append(Check("zero input has zero norm", 0.0, 0.0, 0.0))
    elif args.delta is not None:
        comb = _comb(args.delta, args.weights)
        grid = _grid_args(args, DELTA_GRID)
        inputs.update(input="deltas", atoms=_comb_inputs(comb),
                      grid={"half_width": grid.half_width, "num_points": grid.num_points})
        spec = comb_spectrum(comb, grid)
        q = hs_inner_report(spec, spec, s)
        norm_sq = q.value.real
        diag["quadrature"] = q.as_dict()
        if args.verify and s == -1:
            ref = math.sqrt(comb_gram_form(comb))
            checks.append(Check("norm vs closed-form delta Gram", math.sqrt(max(norm_sq, 0)),
                                ref, 1e-6))
    else:
        c, r = args.bump
        grid = _grid_args(args, make_grid())
        f = bump(c, r, half_width=grid.half_width)
        inputs.update(input="bump", center=c, radius=r,
                      grid={"half_width": grid.half_width, "num_points": grid.num_points})
        spec = fourier_transform(f, grid)
        q = hs_inner_report(spec, spec, s)
        norm_sq = q.value.real
        diag["quadrature"] = q.as_dict()
        if args.verify and s in (0, 1, 2, 3):
            ref = physical_inner_hm(f, f, int(s)).real
            checks.append(Check("norm^2 vs physical-side derivative sum", norm_sq, ref, 1e-8,
                                "rel"))
    results = {"norm": math.sqrt(max(norm_sq, 0.0)), "norm_sq": norm_sq}
    return RunReport("norm", __version__, inputs, results, checks, diag)


def _shared_bumps(u, v, half_width):
    f = bump(u[0], u[1], half_width=half_width)
    g = bump(v[0], v[1], half_width=half_width)
    lo = min(f.origin, g.origin)
    hi = max(f.x[-1], g.x[-1])
    n = int(round((hi - lo) / f.spacing)) + 1
    return f.to_grid(lo, n), g.to_grid(lo, n)


def cmd_inner(args) -> RunReport:
    s = args.s
    checks = []
    if args.u_delta is not None or args.v_delta is not None:
        if args.u_delta is None or args.v_delta is None:
            raise HsExtError("give both --u-delta and --v-delta")
        u = _comb(args.u_delta, args.u_weights)
        v = _comb(args.v_delta, args.v_weights)
        grid = _grid_args(args, DELTA_GRID)
        q = hs_inner_report(comb_spectrum(u, grid), comb_spectrum(v, grid), s)
        inputs = {"s": s, "input": "deltas", "u": _comb_inputs(u), "v": _comb_inputs(v)}
        if args.verify and s == -1:
            checks.append(Check("quadrature vs closed-form delta product", q.value,
                                comb_inner_hminus1(u, v), 1e-6))
    elif args.u_bump is not None and args.v_bump is not None:
        grid = _grid_args(args, make_grid())
        f, g = _shared_bumps(args.u_bump, args.v_bump, grid.half_width)
        q = hs_inner_report(fourier_transform(f, grid), fourier_transform(g, grid), s)
        inputs = {"s": s, "input": "bumps", "u": list(args.u_bump), "v": list(args.v_bump)}
        if args.verify and s in (0, 1, 2, 3):
            ref = physical_inner_hm(f, g, int(s))
            scale = math.sqrt(physical_inner_hm(f, f, int(s)).real
                              * physical_inner_hm(g, g, int(s)).real)
            checks.append(Check("quadrature vs physical-side derivative sum",
                                q.value, ref, 1e-8 * scale))
    else:
        raise HsExtError("give --u-delta/--v-delta or --u-bump/--v-bump")
    inputs["grid"] = {"half_width": grid.half_width, "num_points": grid.num_points}
    return RunReport("inner", __version__, inputs, {"inner": q.value}, checks,
                     {"quadrature": q.as_dict()})


def cmd_extend(args) -> RunReport:
    dom = IntervalDomain(args.a, args.b)
    U = _comb(args.delta_at, args.weights)
    probes = args.probes
    inputs = {"a": dom.a, "b": dom.b, "m": args.m, "atoms": _comb_inputs(U)}
    checks = []
    if args.m == 1:
        res = project_Qminus1(U, dom, probes)
        ca = next((t.weight for t in res.boundary_comb.atoms if t.location == dom.a), 0j)
        cb = next((t.weight for t in res.boundary_comb.atoms if t.location == dom.b), 0j)
        results = {"c_a": ca, "c_b": cb}
        if args.verify:
            oa, ob = oracle_minimize_h1(U, dom)
            scale = max(abs(oa), abs(ob), 1e-300)
            checks.append(Check("c_a vs normal equations", ca, oa, 1e-12 * scale))
            checks.append(Check("c_b vs normal equations", cb, ob, 1e-12 * scale))
            checks.append(Check("exterior residual", res.max_residual, 0.0, 1e-12, "le"))
            checks.append(Check("norm^2 <= trivial extension", res.norm_sq,
                                comb_gram_form(U), 1e-15, "le"))
            if len(U) == 1 and U.atoms[0].weight == 1 and dom.a < U.atoms[0].location < dom.b:
                checks.append(Check("norm^2 vs sinh closed form", res.norm_sq,
                                    delta_interval_norm_sq(U.atoms[0].location, dom), 1e-12))
    else:
        res = project_Qminus_m(U, dom, args.m, probes)
        results = {"boundary": res.boundary_comb.to_list()}
        if args.verify:
            checks.append(Check("exterior residual", res.max_residual, 0.0, 1e-8, "le"))
    results.update(norm=res.norm, norm_sq=res.norm_sq,
                   extended=res.extended.to_list(),
                   residuals=[{"probe": y, "abs_inner": r} for y, r in res.residuals])
    return RunReport("extend", __version__, inputs, results, checks)


def cmd_interval_norm(args) -> RunReport:
    poly = np.polynomial.Polynomial(args.poly)
    dpoly = poly.deriv()
    phi = IntervalFunction.from_callable(poly, args.a, args.b, args.samples, dfn=dpoly)
    inputs = {"a": args.a, "b": args.b, "poly": list(args.poly), "samples": args.samples,
              "halo": args.halo, "seed": args.seed, "trials": args.trials}
    h1 = h1_interval_norm_sq(phi)
    h2 = h2_interval_norm_sq(phi)
    results = {"h1_norm_sq": h1, "h2_norm_sq": h2}
    checks = []
    if args.verify:
        ext = h1_minimal_extension(phi, args.halo)
        ext_sq = piecewise_h1_inner(ext, ext, (phi.a, phi.b)).real
        probe = stationarity_probe(phi, args.halo, args.trials, seed=args.seed)
        fam = h2_extension_family_min(phi, seed=args.seed)
        results.update(h1_extension_norm_sq=ext_sq,
                       h1_max_directional_derivative=probe["max_directional_derivative"],
                       h1_max_decrease=probe["max_decrease"],
                       h2_family_min=fam["norm_sq"])
        checks += [
            Check("H1 formula vs extension quadrature", ext_sq, h1, 1e-6, "rel"),
            Check("H1 stationarity", probe["max_directional_derivative"], 0.0, 1e-6, "le"),
            Check("H1 no exterior decrease", probe["max_decrease"], 0.0, 1e-6, "le"),
            Check("H2 family minimum vs formula", fam["norm_sq"], h2, 1e-4, "rel"),
            Check("H2 family minimum not below formula", h2 * (1 - 1e-8), fam["norm_sq"], 0.0,
                  "le"),
        ]
    return RunReport("interval-norm", __version__, inputs, results, checks)


def cmd_phi_seq(args) -> RunReport:
    if args.n_max < 0:
        raise HsExtError(f"--n-max must be nonnegative, got {args.n_max}")
    columns = ["N", "norm_sq", "norm_sq_gram", "diff_closed", "diff_gram"]
    rows = []
    checks = []
    prev = None
    for n in range(args.n_max + 1):
        ns = phi_norm_sq(args.alpha, n)
        ng = phi_norm_sq_gram(args.alpha, n)
        if n:
            dc = phi_norm_diff(args.alpha, n)
            dg = phi_norm_diff_gram(args.alpha, n)
        else:
            dc = dg = 0.0
        rows.append([n, ns, ng, dc, dg])
        if args.verify:
            checks.append(Check(f"N={n} double sum vs Gram", ns, ng, 1e-12, "rel"))
            if n:
                checks.append(Check(f"N={n} closed-form diff vs Gram", dc, dg, 1e-10, "rel"))
                checks.append(Check(f"N={n} strict decrease", dc, 0.0, 0.0, "lt"))
                # the summed norms resolve the step only while it exceeds rounding
                if abs(dg) > 1e-13 * prev:
                    checks.append(Check(f"N={n} norm below N-1", ns, prev, 0.0, "lt"))
        prev = ns
    inputs = {"alpha": args.alpha, "n_max": args.n_max}
    results = {"count": len(rows), "first_norm_sq": rows[0][1], "last_norm_sq": rows[-1][1]}
    return RunReport("phi-seq", __version__, inputs, results, checks, rows=rows, columns=columns)


def _scan_d(args):
    if args.d_max is None:
        return np.geomspace(args.d_min, 20.0 * args.d_min, args.num_d)
    if args.spacing == "log":
        if args.d_min <= 0:
            raise HsExtError("log spacing needs d_min > 0")
        return np.geomspace(args.d_min, args.d_max, args.num_d)
    return np.linspace(args.d_min, args.d_max, args.num_d)


def cmd_chi_scan(args) -> RunReport:
    grid = _grid_args(args, CHI_GRID)
    phi = bump(args.center, args.radius, half_width=grid.half_width)
    d = _scan_d(args)
    scan = chi_scan(phi, args.s, d, grid)
    columns = ["d", "chi_re", "chi_im", "abs_chi", "ratio"]
    rows = [[dv, c.real, c.imag, abs(c), abs(c) / scan.chi0] for dv, c in scan.rows()]
    checks = []
    if args.verify:
        mirror = chi_scan(phi, args.s, -d, grid, _spectrum=fourier_transform(phi, grid))
        err = float(np.max(np.abs(mirror.chi - np.conj(scan.chi)))) / scan.chi0
        checks.append(Check("chi(-d) = conj(chi(d))", err, 0.0, 1e-12, "le"))
        shifted = fourier_transform(phi.shifted(float(d[0])), grid)
        direct = hs_inner_report(fourier_transform(phi, grid), shifted, args.s).value
        checks.append(Check("first chi vs inner product with translate", scan.chi[0], direct,
                            1e-8 * scan.chi0))
    inputs = {"s": args.s, "center": args.center, "radius": args.radius,
              "d_min": float(d.min()), "d_max": float(d.max()), "num_d": len(d),
              "grid": {"half_width": grid.half_width, "num_points": grid.num_points}}
    results = {"chi0": scan.chi0, "max_abs_ratio": max(r[4] for r in rows)}
    return RunReport("chi-scan", __version__, inputs, results, checks,
                     {"tail_estimate": scan.tail_estimate}, rows=rows, columns=columns)


def cmd_dichotomy(args) -> RunReport:
    grid = _grid_args(args, CHI_GRID)
    phi = bump(0.0, args.radius, half_width=grid.half_width)
    table = dichotomy_report(phi, args.orders, args.d_min, grid=grid)
    columns = ["s", "max_abs_chi", "chi0", "ratio", "classification"]
    rows = [[t[c] for c in columns] for t in table]
    checks = []
    if args.verify:
        for t in table:
            s = t["s"]
            expected = "orthogonal" if s >= 0 and float(s).is_integer() else "non-orthogonal"
            checks.append(Check(f"s={s} classified {expected}", t["classification"] == expected,
                                True, 0.0))
    inputs = {"orders": list(args.orders), "radius": args.radius, "d_min": args.d_min,
              "grid": {"half_width": grid.half_width, "num_points": grid.num_points}}
    results = {"classifications": {str(t["s"]): t["classification"] for t in table}}
    return RunReport("dichotomy", __version__, inputs, results, checks,
                     {"tail_estimates": [t["tail_estimate"] for t in table]},
                     rows=rows, columns=columns)


def cmd_gap(args) -> RunReport:
    dom = IntervalDomain(args.a, args.b)
    U = _comb(args.delta_at, args.weights)
    interior, whole, gap = restriction_norm_gap(U, dom)
    checks = []
    if args.verify:
        if U:
            checks.append(Check("gap strictly positive", 0.0, gap, 0.0, "lt"))
        else:
            checks.append(Check("zero comb has zero gap", gap, 0.0, 0.0))
        if len(U) == 1 and U.atoms[0].weight == 1:
            x = U.atoms[0].location
            checks.append(Check("gap vs sinh closed form", gap,
                                0.5 - delta_interval_norm_sq(x, dom), 1e-12))
    inputs = {"a": dom.a, "b": dom.b, "atoms": _comb_inputs(U)}
    results = {"interior_norm": interior, "global_norm": whole, "gap": gap}
    return RunReport("gap", __version__, inputs, results, checks)


# --- parser ----------------------------------------------------------------

def _common(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="output file; '-' for stdout "
                   f"(default: stdout, or ${OUTPUT_DIR_ENV}/<command>.<format> if set)")
    p.add_argument("--verify", action="store_true",
                   help="run the independent oracle and exit 3 on tolerance failure")


def _grid_opts(p):
    p.add_argument("--xi", type=_finite, help="frequency half-width of the quadrature grid")
    p.add_argument("--n", type=int, help="number of frequency points (power of two)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsext", description="Sobolev-space norms, delta combs and minimal-norm "
                     "extensions on the real line.", epilog="Exit status: 0 ok, 2 invalid input, "
                     "3 tolerance failure under --verify.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", help="H^s norm of a delta comb or a bump")
    _common(p)
    _grid_opts(p)
    p.add_argument("--s", type=_finite, default=-1.0)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--zero", action="store_true")
    src.add_argument("--delta", type=_finite, nargs="+", metavar="X")
    src.add_argument("--bump", type=_finite, nargs=2, metavar=("CENTER", "RADIUS"))
    p.add_argument("--weights", type=_finite, nargs="+")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("inner", help="H^s inner product of two delta combs or two bumps")
    _common(p)
    _grid_opts(p)
    p.add_argument("--s", type=_finite, default=-1.0)
    p.add_argument("--u-delta", type=_finite, nargs="+", metavar="X")
    p.add_argument("--u-weights", type=_finite, nargs="+")
    p.add_argument("--v-delta", type=_finite, nargs="+", metavar="Y")
    p.add_argument("--v-weights", type=_finite, nargs="+")
    p.add_argument("--u-bump", type=_finite, nargs=2, metavar=("CENTER", "RADIUS"))
    p.add_argument("--v-bump", type=_finite, nargs=2, metavar=("CENTER", "RADIUS"))
    p.set_defaults(func=cmd_inner)

    p = sub.add_parser("extend", help="minimal-norm extension of a delta comb from (a, b)")
    _common(p)
    p.add_argument("--a", type=_finite, required=True)
    p.add_argument("--b", type=_finite, required=True)
    p.add_argument("--delta-at", type=_finite, nargs="+", required=True, metavar="X")
    p.add_argument("--weights", type=_finite, nargs="+")
    p.add_argument("--m", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--probes", type=_finite, nargs="+",
                   help="residual probe points (default a-2, a-0.5, a, b, b+0.5, b+2)")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("interval-norm", help="H^1 and H^2 norms of a polynomial on (a, b)")
    _common(p)
    p.add_argument("--a", type=_finite, default=0.0)
    p.add_argument("--b", type=_finite, default=1.0)
    p.add_argument("--poly", type=_finite, nargs="+", default=[1.0],
                   help="coefficients c0 c1 ... of c0 + c1 x + ...")
    p.add_argument("--samples", type=int, default=1025)
    p.add_argument("--halo", type=_finite, default=20.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_interval_norm)

    p = sub.add_parser("phi-seq", help="norms of the decreasing extension sequence Phi_N")
    _common(p)
    p.add_argument("--alpha", type=_finite, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_phi_seq)

    p = sub.add_parser("chi-scan", help="translate correlation chi(d) of a mollifier")
    _common(p)
    _grid_opts(p)
    p.add_argument("--s", type=_finite, required=True)
    p.add_argument("--center", type=_finite, default=0.0)
    p.add_argument("--radius", type=_finite, default=1.0)
    p.add_argument("--d-min", type=_finite, default=3.0)
    p.add_argument("--d-max", type=_finite)
    p.add_argument("--num-d", type=int, default=64)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.set_defaults(func=cmd_chi_scan)

    p = sub.add_parser("dichotomy", help="integer/non-integer orthogonality classification")
    _common(p)
    _grid_opts(p)
    p.add_argument("--orders", type=_finite, nargs="+", default=[0.0, 1.0, 2.0, 0.5, -1.0])
    p.add_argument("--radius", type=_finite, default=1.0)
    p.add_argument("--d-min", type=_finite, default=3.0)
    p.set_defaults(func=cmd_dichotomy)

    p = sub.add_parser("gap", help="H^-1 norm lost by restricting a delta comb to (a, b)")
    _common(p)
    p.add_argument("--a", type=_finite, required=True)
    p.add_argument("--b", type=_finite, required=True)
    p.add_argument("--delta-at", type=_finite, nargs="*", default=[], metavar="X")
    p.add_argument("--weights", type=_finite, nargs="+")
    p.set_defaults(func=cmd_gap)
    return parser


def _destination(args):
    if args.output == "-":
        return None
    if args.output:
        return Path(args.output)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / f"{args.command}.{args.format}"
    return None


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "csv" and args.command not in TABLE_COMMANDS:
        parser.exit(EXIT_VALIDATION,
                    f"hsext: error: --format csv is only available for {', '.join(TABLE_COMMANDS)}\n")
    start = time.perf_counter()
    try:
        report = args.func(args)
    except HsExtError as exc:
        print(f"hsext: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report.verify = args.verify
    report.duration_s = time.perf_counter() - start
    text = to_csv(report) if args.format == "csv" else to_json(report)
    dest = _destination(args)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text, encoding="utf-8")
    if args.verify and not report.all_passed:
        return EXIT_TOLERANCE
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
