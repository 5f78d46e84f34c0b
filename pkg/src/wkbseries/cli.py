"""Command-line interface: ``wkbseries {spectrum,verify,scaling,coefficients,dump-sigma}``.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import coeffs, spectrum, symbolic, verify
from .model import DimensionlessSpec, PotentialSpec

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["config", "rows", "checks"],
    "additionalProperties": False,
    "properties": {
        "config": {
            "type": "object",
            "required": ["command", "a", "b", "hbar"],
            "properties": {
                "command": {"type": "string"},
                "a": {"type": "number"},
                "b": {"type": "number"},
                "hbar": {"type": "number"},
                "mass": {"type": "number"},
                "depth": {"type": "number"},
                "alpha": {"type": "number"},
            },
        },
        "rows": {"type": "array", "items": {"type": "object"}},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "deviation", "tolerance", "detail"],
                "properties": {
                    "name": {"type": "string"},
                    "passed": {"type": "boolean"},
                    "deviation": {"type": "number"},
                    "tolerance": {"type": "number"},
                    "detail": {"type": "string"},
                },
            },
        },
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, Fraction):
        return _fmt(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def parse_int_list(text: str) -> list[int]:
    """``"0,2,5"`` or inclusive range ``"0:10"``."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            values = list(range(lo, hi + 1))
        else:
            values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse integer list {text!r}") from exc
    if not values:
        raise UsageError(f"empty range {text!r}")
    if any(v < 0 for v in values):
        raise UsageError(f"negative entries in {text!r}")
    return values


def parse_b_grid(text: str) -> list[float]:
    """``"10,20,50"`` or log-spaced ``"start:stop:count"``."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            values = [float(v) for v in np.geomspace(float(lo), float(hi), int(n))]
        else:
            values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse B grid {text!r}") from exc
    if not values:
        raise UsageError("empty B grid")
    return values


def resolve_spec(args) -> tuple[DimensionlessSpec, PotentialSpec, dict]:
    physical = [args.mass, args.depth, args.alpha]
    hbar = 1.0 if args.hbar is None else args.hbar
    try:
        if any(v is not None for v in physical):
            if any(v is None for v in physical):
                raise UsageError("--mass, --depth and --alpha must be given together")
            if args.a is not None or args.b is not None:
                raise UsageError("give either --a/--b or --mass/--depth/--alpha, not both")
            phys = PotentialSpec(mass=args.mass, well_depth=args.depth, width=args.alpha, hbar=hbar)
            dim = phys.dimensionless()
            echo = {"mass": phys.mass, "depth": phys.well_depth, "alpha": phys.width}
        else:
            dim = DimensionlessSpec(A=1.0 if args.a is None else args.a, B=4.0 if args.b is None else args.b, hbar=hbar)
            phys = dim.physical()
            echo = {}
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    config = {"command": args.command, "a": dim.A, "b": dim.B, "hbar": dim.hbar, **echo}
    return dim, phys, config


def _order_tag(K: int) -> str:
    return f"k{K}_n{spectrum.hbar_order(K)}"


def cmd_spectrum(args, dim: DimensionlessSpec, config: dict):
    nus = parse_int_list(args.nu)
    orders = parse_int_list(args.orders)
    config.update(nu=nus, orders=orders, hbar_orders=[spectrum.hbar_order(K) for K in orders])
    columns = ["nu", "e_exact", "e_torus"]
    columns += [f"e_wkb_{_order_tag(K)}" for K in orders]
    columns += [f"err_spacings_{_order_tag(K)}" for K in orders]
    rows = []
    for r in spectrum.spectrum_rows(dim, nus, orders):
        row = {"nu": r.nu, "e_exact": r.e_exact, "e_torus": r.e_torus}
        row.update({f"e_wkb_{_order_tag(K)}": r.e_wkb[K] for K in orders})
        row.update({f"err_spacings_{_order_tag(K)}": r.err_spacings[K] for K in orders})
        rows.append(row)
    config["divergent_series"] = dim.B <= 1.0 and any(K >= 1 for K in orders)
    return columns, rows, []


def cmd_scaling(args, dim: DimensionlessSpec, config: dict):
    orders = parse_int_list(args.orders)
    grid = parse_b_grid(args.b_grid)
    if any(b <= 1.0 for b in grid):
        raise UsageError("every B in the grid must exceed 1")
    try:
        slopes = {K: spectrum.fit_scaling_slope(K, grid, A=dim.A) for K in orders}
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    config.update(orders=orders, b_grid=grid)
    columns = ["k", "n", "b", "error_limit", "asymptotic_error", "fitted_slope", "target_slope"]
    rows = []
    for K in orders:
        for b in grid:
            d = DimensionlessSpec(A=dim.A, B=b, hbar=dim.hbar)
            rows.append({
                "k": K, "n": spectrum.hbar_order(K), "b": b,
                "error_limit": spectrum.error_limit(K, d),
                "asymptotic_error": spectrum.asymptotic_error(K, d),
                "fitted_slope": slopes[K], "target_slope": -(2 * K + 1),
            })
    return columns, rows, []


def cmd_coefficients(args, dim: DimensionlessSpec, config: dict):
    k_max = args.k_max
    if k_max < 1:
        raise UsageError("--k-max must be >= 1")
    config.update(k_max=k_max, prefactor="2 m alpha U0 = 1 (canonical units)")
    binoms = coeffs.half_binomials(k_max)
    c = coeffs.c_k0_sequence(k_max)
    columns = ["k", "half_binomial", "c_k0", "phase_coefficient"]
    rows = [
        {"k": k, "half_binomial": binoms[k], "c_k0": c[k],
         "phase_coefficient": coeffs.phase_coefficient(k) if k >= 1 else ""}
        for k in range(k_max + 1)
    ]
    return columns, rows, []


def cmd_dump_sigma(args, dim: DimensionlessSpec, config: dict):
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    config.update(n_max=args.n_max, units="2m = alpha = U0 = 1")
    columns = ["n", "l", "e_power", "numerator", "denominator"]
    rows = []
    for sp in symbolic.recurse_sigma(args.n_max)[1:]:
        for l, poly in sorted(sp.coeffs.items()):
            for a, coef in enumerate(poly):
                if coef:
                    rows.append({"n": sp.order, "l": l, "e_power": a,
                                 "numerator": coef.numerator, "denominator": coef.denominator})
    return columns, rows, []


def cmd_verify(args, dim: DimensionlessSpec, config: dict, phys: PotentialSpec):
    config.update(quad_tol=args.quad_tol, eig_tol=args.eig_tol)
    checks = [c.as_dict() for c in verify.run_all(phys, quad_tol=args.quad_tol, eig_tol=args.eig_tol)]
    columns = ["name", "passed", "deviation", "tolerance", "detail"]
    return columns, checks, checks


def render(fmt: str, columns, rows, checks, config: dict) -> str:
    if fmt == "json":
        payload = {
            "config": {k: _json_value(v) for k, v in config.items()},
            "rows": [{k: _json_value(row[k]) for k in columns} for row in rows] if not checks else [],
            "checks": checks,
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={_fmt(v) if not isinstance(v, list) else ','.join(map(_fmt, v))}"
                              for k, v in config.items()) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[k]) for k in columns])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters (either --a/--b or --mass/--depth/--alpha)")
    g.add_argument("--a", type=float, help="energy scale A = alpha^2 hbar^2 / 2m (default 1)")
    g.add_argument("--b", type=float, help="dimensionless depth B = sqrt(8 m U0)/(alpha hbar) (default 4)")
    g.add_argument("--hbar", type=float, help="Planck constant (default 1)")
    g.add_argument("--mass", type=float)
    g.add_argument("--depth", type=float, help="U0")
    g.add_argument("--alpha", type=float)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=Path, help="output file (default stdout)")

    parser = _Parser(prog="wkbseries", description="All-order WKB series for V = U0 / cos^2(alpha x).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="exact, torus and order-K levels")
    p.add_argument("--nu", default="0:9", help="quantum numbers: 'a:b' inclusive or comma list")
    p.add_argument("--orders", default="0,2", help="truncation orders K (hbar order N = 2K)")

    p = sub.add_parser("verify", parents=[common], help="run every cross-check")
    p.add_argument("--quad-tol", type=float, default=1e-8)
    p.add_argument("--eig-tol", type=float, default=1e-6)

    p = sub.add_parser("scaling", parents=[common], help="error limit vs B and fitted log-log slope")
    p.add_argument("--orders", default="0,1,2")
    p.add_argument("--b-grid", default="10:100:10", help="'start:stop:count' log-spaced or comma list")

    p = sub.add_parser("coefficients", parents=[common], help="binom(1/2,k), C_{k,0}, phase coefficients")
    p.add_argument("--k-max", type=int, default=12)

    p = sub.add_parser("dump-sigma", parents=[common], help="C_{n,l} tables of the exact recursion")
    p.add_argument("--n-max", type=int, default=12)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        dim, phys, config = resolve_spec(args)
        if args.command == "verify":
            columns, rows, checks = cmd_verify(args, dim, config, phys)
        else:
            handler = {
                "spectrum": cmd_spectrum,
                "scaling": cmd_scaling,
                "coefficients": cmd_coefficients,
                "dump-sigma": cmd_dump_sigma,
            }[args.command]
            columns, rows, checks = handler(args, dim, config)
    except UsageError as exc:
        print(f"wkbseries: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(args.format, columns, rows, checks, config)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    if checks and not all(c["passed"] for c in checks):
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
