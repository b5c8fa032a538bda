"""Command-line front end with machine-readable output.

Exit codes: 0 on Yes/success, 2 on No, 3 on Unknown/Inconclusive, 1 on error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import clark, groebner, rif, spaces
from .compare import CompareOptions
from .compare import compare as run_compare
from .polyalg import ParseError, Poly2, PolynomialError, parse_poly, poly_to_str

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO = 2
EXIT_UNKNOWN = 3


class CliError(Exception):
    pass


def _parse_deg(text: str):
    try:
        d1, d2 = text.split(",")
        return (int(d1), int(d2))
    except ValueError as exc:
        raise CliError(f"--deg expects 'd1,d2', got {text!r}") from exc


def _parse_alpha(text: str) -> complex:
    try:
        p = parse_poly(text)
    except ParseError as exc:
        raise CliError(f"bad alpha {text!r}: {exc}") from exc
    if p.actual_degree() != (0, 0):
        raise CliError(f"alpha must be a constant, got {text!r}")
    a = complex(p.evaluate(0, 0))
    if abs(abs(a) - 1.0) > 1e-12:
        raise CliError(f"alpha must be unimodular, got {text!r}")
    exact = p.coeff(0, 0)
    from .polyalg import as_exact_unimodular

    g = as_exact_unimodular(exact) if p.exact else None
    return g if g is not None else a


def _parse_poly_arg(text: str) -> Poly2:
    try:
        return parse_poly(text)
    except ParseError as exc:
        raise CliError(exc.caret()) from exc


def _build_rif(text: str, deg, grid_n: int = 64):
    return rif.build(_parse_poly_arg(text), deg, grid_n=grid_n)


def _check_grid(grid_n: int, K: int | None = None):
    if grid_n & (grid_n - 1):
        raise CliError(f"grid_n must be a power of two, got {grid_n}")
    if K is not None and K > grid_n // 4:
        raise CliError(f"K={K} must be at most grid_n/4={grid_n // 4}")


def _emit(args, payload: dict) -> None:
    if args.output == "json":
        print(json.dumps(payload, indent=2))
    else:
        for key, val in payload.items():
            print(f"{key}: {val}")


def _seeded_points(seed: int, count: int, radius: float = 0.7):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        r1, r2 = radius * np.sqrt(rng.uniform(size=2))
        a1, a2 = rng.uniform(0, 2 * np.pi, size=2)
        pts.append((r1 * np.exp(1j * a1), r2 * np.exp(1j * a2)))
    return pts


def cmd_reflect(args) -> int:
    p = _parse_poly_arg(args.poly)
    from .polyalg import reflect

    out = reflect(p, _parse_deg(args.deg))
    if args.output == "json":
        print(json.dumps({"result": poly_to_str(out)}))
    else:
        print(poly_to_str(out))
    return EXIT_OK


def cmd_rif_check(args) -> int:
    try:
        r = _build_rif(args.poly, _parse_deg(args.deg), grid_n=args.stability_grid)
    except rif.UnstableDenominatorError as exc:
        _emit(args, {"accepted": False, "witness": str(exc.witness)})
        return EXIT_NO
    deviation = rif.verify_inner(r, grid_n=64)
    singular = rif.torus_singularities(r, grid_n=256)
    _emit(
        args,
        {
            "accepted": True,
            "min_root_modulus": r.stability_report.min_root_modulus,
            "boundary_modulus_deviation": deviation,
            "torus_singularities": [f"({a:.6g}, {b:.6g})" for a, b in singular],
        },
    )
    return EXIT_OK


def cmd_clark(args) -> int:
    _check_grid(args.grid_n)
    r = _build_rif(args.poly, _parse_deg(args.deg))
    alpha = _parse_alpha(args.alpha)
    model = clark.build_model(r, alpha, grid_n=args.grid_n)
    if args.emit_csv:
        model.to_csv(args.emit_csv)
    payload = model.to_json()
    payload["mass_error"] = abs(model.total_mass() - model.expected_mass())
    _emit(args, payload)
    return EXIT_OK


def cmd_poisson_verify(args) -> int:
    _check_grid(args.grid_n)
    r = _build_rif(args.poly, _parse_deg(args.deg))
    alpha = _parse_alpha(args.alpha)
    model = clark.build_model(r, alpha, grid_n=args.grid_n)
    points = _seeded_points(args.seed, args.points)
    residual = clark.verify_clark_identity(r, alpha, model, points)
    ok = residual <= args.tol
    _emit(args, {"residual": residual, "tol": args.tol, "pass": bool(ok)})
    return EXIT_OK if ok else EXIT_NO


def cmd_h2(args) -> int:
    num = _parse_poly_arg(args.num)
    den = _parse_poly_arg(args.den)
    f = spaces.RationalFunction.checked(num.to_float(), den)
    verdict = spaces.h2_classify(f, max_level=args.max_level)
    _emit(args, verdict.to_json())
    if verdict.is_finite:
        return EXIT_OK
    if verdict.is_divergent:
        return EXIT_NO
    return EXIT_UNKNOWN


def _parse_basis(text: str):
    return [_parse_poly_arg(part) for part in text.split(";") if part.strip()]


def cmd_groebner(args) -> int:
    gens = _parse_basis(args.gens)
    order = groebner.MonomialOrder.parse(args.order)
    basis = groebner.buchberger(gens, order)
    _emit(args, basis.to_json())
    return EXIT_OK


def cmd_nf(args) -> int:
    q = _parse_poly_arg(args.poly)
    gens = _parse_basis(args.basis)
    order = groebner.MonomialOrder.parse(args.order)
    basis = groebner.buchberger(gens, order)
    remainder = basis.normal_form(q)
    payload = basis.to_json()
    payload["remainder"] = poly_to_str(remainder)
    payload["member"] = remainder.is_zero()
    _emit(args, payload)
    return EXIT_OK


def cmd_compare(args) -> int:
    _check_grid(args.grid_n, args.K)
    b1 = _build_rif(args.poly1, _parse_deg(args.deg1))
    b2 = _build_rif(args.poly2, _parse_deg(args.deg2))
    alpha = _parse_alpha(args.alpha)
    opts = CompareOptions(
        path=args.path, K=args.K, grid_n=args.grid_n, max_level=args.max_level
    )
    verdict = run_compare(b1, b2, alpha, opts=opts)
    _emit(args, verdict.to_json())
    if verdict.answer == "yes":
        return EXIT_OK
    if verdict.answer == "no":
        return EXIT_NO
    return EXIT_UNKNOWN


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="clarktorus",
        description="Clark-Aleksandrov measures of rational inner functions on the bidisc",
    )
    ap.add_argument("--output", choices=("json", "text"), default="json")
    ap.add_argument("--seed", type=int, default=2024)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reflect", help="reflection p~ of a polynomial")
    p.add_argument("poly")
    p.add_argument("--deg", required=True)
    p.set_defaults(fn=cmd_reflect)

    p = sub.add_parser("rif-check", help="validate stability of p on the bidisc")
    p.add_argument("poly")
    p.add_argument("--deg", required=True)
    p.add_argument("--stability-grid", type=int, default=64)
    p.set_defaults(fn=cmd_rif_check)

    p = sub.add_parser("clark", help="Clark measure model of p~/p at alpha")
    p.add_argument("poly")
    p.add_argument("--deg", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=2048)
    p.add_argument("--emit-csv", dest="emit_csv", default=None)
    p.set_defaults(fn=cmd_clark)

    p = sub.add_parser("poisson-verify", help="check the defining Poisson identity")
    p.add_argument("poly")
    p.add_argument("--deg", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=2048)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(fn=cmd_poisson_verify)

    p = sub.add_parser("h2", help="H^2 membership of a rational function q/p")
    p.add_argument("num", metavar="q")
    p.add_argument("slash", metavar="/", nargs="?", default="/")
    p.add_argument("den", metavar="p")
    p.add_argument("--max-level", dest="max_level", type=int, default=20)
    p.set_defaults(fn=cmd_h2)

    p = sub.add_parser("groebner", help="reduced Groebner basis of ';'-separated generators")
    p.add_argument("gens")
    p.add_argument("--order", default="lex:z1,z2")
    p.set_defaults(fn=cmd_groebner)

    p = sub.add_parser("nf", help="normal form of a polynomial against a basis")
    p.add_argument("poly")
    p.add_argument("--basis", required=True)
    p.add_argument("--order", default="lex:z1,z2")
    p.set_defaults(fn=cmd_nf)

    p = sub.add_parser("compare", help="decide sigma1 << sigma2 with L^2 derivative")
    p.add_argument("poly1")
    p.add_argument("poly2")
    p.add_argument("--deg1", required=True)
    p.add_argument("--deg2", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--path", choices=("auto", "exact", "numeric", "both"), default="auto")
    p.add_argument("--K", type=int, default=16)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=256)
    p.add_argument("--max-level", dest="max_level", type=int, default=20)
    p.set_defaults(fn=cmd_compare)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "slash", "/") != "/":
        print("error: h2 expects 'q / p'", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ParseError as exc:
        print(f"error:\n{exc.caret()}", file=sys.stderr)
        return EXIT_ERROR
    except (PolynomialError, clark.InvalidRIFError, clark.BranchDegeneracyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except rif.UnstableDenominatorError as exc:
        print(f"error: rejected-unstable: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except spaces.DivergentSliceError as exc:
        print(f"error: divergent-or-singular: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
