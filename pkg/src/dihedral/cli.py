"""Command-line front end.

Subcommands run individual verification families; ``report --all`` runs
the complete deterministic suite.  All parameters are exact rationals in
"p/q" syntax; numerical tolerances are ordinary floats.  Exit status is 0
when every check passes or is reconciled via the sign ledger, 1 when any
check fails, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

import sympy as sp

from . import reports
from .cas import rational_from_string

__all__ = ["main", "build_parser"]


def _rational(text: str) -> sp.Rational:
    try:
        return rational_from_string(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_common(p: argparse.ArgumentParser, *names: str) -> None:
    if "l0" in names:
        p.add_argument("--l0", type=_rational, default=None)
    if "l1" in names:
        p.add_argument("--l1", type=_rational, default=None)
    if "alpha" in names:
        p.add_argument("--alpha", type=_rational, default=None)
    if "beta" in names:
        p.add_argument("--beta", type=_rational, default=None)
    if "z" in names:
        p.add_argument("--z", type=_rational, default=None)
    if "tol" in names:
        p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument(
        "--json", action="store_true", help="emit the JSON report on stdout"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dihedral",
        description="Exact and numerical certification of the connection family",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "flatness": ("l0", "l1"),
        "residues": ("l0", "l1", "alpha", "z"),
        "monodromy": ("l0", "l1", "alpha", "beta", "z", "tol"),
        "pvi": ("l0", "l1"),
        "garnier": (),
        "foliation": (),
    }
    for name, common in specs.items():
        p = sub.add_parser(name)
        _add_common(p, *common)
    p = sub.add_parser("curve")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p = sub.add_parser("report")
    p.add_argument("--all", action="store_true", dest="run_all")
    p.add_argument("--full", action="store_true",
                   help="include the symmetrized-system identities")
    _add_common(p, "tol")
    p = sub.add_parser("garnier-full")
    _add_common(p)
    return parser


def _resolve_z(args) -> sp.Expr:
    if getattr(args, "z", None) is not None:
        return args.z
    if getattr(args, "beta", None) is not None:
        if args.alpha is None:
            raise ValueError("--beta requires --alpha")
        z2 = sp.cancel(args.beta * (1 - args.alpha) + args.alpha)
        return sp.sqrt(z2)
    return None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        if args.command == "flatness":
            out = reports.run_check(
                "flatness", l0_value=args.l0, l1_value=args.l1
            ) + reports.run_check(
                "construction", l0_value=args.l0, l1_value=args.l1
            )
        elif args.command == "residues":
            out = reports.run_check(
                "residues",
                l0_value=args.l0,
                l1_value=args.l1,
                alpha_value=args.alpha,
                z_value=args.z,
            )
        elif args.command == "monodromy":
            kwargs = {}
            if args.l0 is not None:
                kwargs["l0_value"] = args.l0
            if args.l1 is not None:
                kwargs["l1_value"] = args.l1
            if args.alpha is not None:
                kwargs["alpha_value"] = args.alpha
            zv = _resolve_z(args)
            if zv is not None:
                kwargs["z_value"] = zv
            if args.tol is not None:
                kwargs["tol"] = args.tol
            out = reports.run_check("monodromy", **kwargs)
            out += reports.run_check("rho")
        elif args.command == "pvi":
            out = reports.run_check("pvi", l0_value=args.l0, l1_value=args.l1)
        elif args.command == "garnier":
            out = reports.run_check("garnier", full=False)
        elif args.command == "garnier-full":
            out = reports.run_check("garnier", full=True)
            out += reports.run_check("quartic")
        elif args.command == "foliation":
            out = reports.run_check("foliation")
        elif args.command == "curve":
            out = reports.run_check("curve", n=args.n)
        elif args.command == "report":
            kwargs = {}
            if args.tol is not None:
                kwargs["tol"] = args.tol
            out = reports.run_all(full=args.full or args.run_all, **kwargs)
        else:  # pragma: no cover - argparse enforces the choices
            return 2
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    text = reports.reports_to_json(out)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.json or not args.out:
        print(text)
    return 0 if all(r.status in ("pass", "reconciled") for r in out) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
