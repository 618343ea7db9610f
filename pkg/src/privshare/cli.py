"""Command-line client: solve, curve, geometry, verify, serve.

Every JSON body printed here goes through the same builders and canonical
encoder as the HTTP service, so scripted output and service responses can
be diffed byte for byte. Errors print a machine-readable JSON object on
stderr and map to exit codes: 2 validation, 3 offer out of range,
4 convergence failure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .closed_forms import solve_conical_sed, solve_n2, solve_n3_sed
from .curve import csv_text, sweep, write_csv
from .dispatch import solve_request
from .errors import InputError, PrivshareError
from .jsonio import canonical_dumps
from .model import mu_max, validate_instance
from .oracle import certify
from .service import (
    build_curve_response,
    build_geometry_response,
    build_solve_response,
    build_thresholds_response,
    response_bytes,
)
from .solver import solve

VERIFY_EXIT = 5


def _load_instance(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read instance file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"instance file is not valid JSON: {exc}") from exc


def _print(body: str) -> None:
    sys.stdout.write(body + "\n")


def _solve_closed(kind, instance, mu):
    if instance.n == 2:
        return solve_n2(kind, instance, mu)
    if kind == "sed" and instance.n == 3:
        sol = solve_n3_sed(instance, mu)
        if sol is not None:
            return sol
    if kind == "sed":
        try:
            sol = solve_conical_sed(instance, mu)
        except InputError:
            sol = None
        if sol is not None:
            return sol
    raise InputError("no closed form applies to this instance/offer", code="NO_CLOSED_FORM")


def cmd_solve(args) -> int:
    raw = _load_instance(args.instance)
    if args.method == "auto":
        instance, solution = solve_request(raw, args.kind, args.mu, args.mode)
    else:
        if args.mode != "strict":
            raise InputError("--mode lenient requires --method auto")
        instance = validate_instance(raw)
        if args.method == "dual":
            solution = solve(args.kind, instance, args.mu)
        else:
            solution = _solve_closed(args.kind, instance, args.mu)
    _print(response_bytes(build_solve_response(args.kind, instance, solution)))
    return 0


def cmd_curve(args) -> int:
    instance = validate_instance(_load_instance(args.instance))
    curve = sweep(args.kind, instance, args.points)
    if args.json:
        _print(response_bytes(build_curve_response(curve)))
    elif args.out:
        write_csv(curve, args.out)
    else:
        sys.stdout.write(csv_text(curve))
    return 0


def cmd_geometry(args) -> int:
    instance = validate_instance(_load_instance(args.instance))
    body = build_geometry_response(args.kind, instance, args.path or 0)
    _print(response_bytes(body))
    return 0


def cmd_thresholds(args) -> int:
    instance = validate_instance(_load_instance(args.instance))
    _print(response_bytes(build_thresholds_response(instance)))
    return 0


def cmd_verify(args) -> int:
    from .dispatch import solve_auto

    instance = validate_instance(_load_instance(args.instance))
    total = mu_max(instance)
    rng = np.random.default_rng(args.seed)
    results = []
    all_pass = True
    for mu in rng.uniform(0.0, total, args.samples):
        solution = solve_auto(args.kind, instance, float(mu))
        report = certify(args.kind, instance, float(mu), solution, resolution=args.resolution)
        all_pass &= report["pass"]
        results.append(
            {
                "mu": float(mu),
                "pass": bool(report["pass"]),
                "gap": float(report["gap"]),
                "oracle_risk": float(report["oracle_risk"]),
                "solver_risk": float(report["solver_risk"]),
                "oracle_method": report["oracle_method"],
            }
        )
    _print(
        canonical_dumps(
            {
                "kind": args.kind,
                "samples": args.samples,
                "results": results,
                "pass": bool(all_pass),
            }
        )
    )
    return 0 if all_pass else VERIFY_EXIT


def cmd_serve(args) -> int:
    from .service import run

    run(port=args.port, bind=args.bind)
    return 0


def _add_instance_flags(sub, with_kind: bool = True) -> None:
    sub.add_argument("--instance", required=True, help="path to an instance JSON file")
    if with_kind:
        sub.add_argument("--kind", choices=("sed", "kl", "isd"), default="sed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privshare",
        description="Optimal disclosure strategies for selling personal-profile data.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("solve", help="solve one offer and print the response JSON")
    _add_instance_flags(p)
    p.add_argument("--mu", type=float, required=True, help="money offer")
    p.add_argument("--mode", choices=("strict", "lenient"), default="strict")
    p.add_argument("--method", choices=("auto", "dual", "closed"), default="auto")
    p.set_defaults(func=cmd_solve)

    p = commands.add_parser("curve", help="sweep the trade-off curve")
    _add_instance_flags(p)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", help="CSV output path (default: CSV on stdout)")
    p.add_argument("--json", action="store_true", help="print curve JSON instead of CSV")
    p.set_defaults(func=cmd_curve)

    p = commands.add_parser("geometry", help="export the dual-plane layout as JSON")
    _add_instance_flags(p)
    p.add_argument(
        "--path",
        type=int,
        nargs="?",
        const=200,
        default=0,
        metavar="N",
        help="include the dual path sampled at N offers (default 200 when given)",
    )
    p.set_defaults(func=cmd_geometry)

    p = commands.add_parser("thresholds", help="print the money-threshold table JSON")
    _add_instance_flags(p, with_kind=False)
    p.set_defaults(func=cmd_thresholds)

    p = commands.add_parser("verify", help="certify solver output against the oracle")
    _add_instance_flags(p)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=100_000)
    p.set_defaults(func=cmd_verify)

    p = commands.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--bind", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PrivshareError as err:
        sys.stderr.write(canonical_dumps({"error": err.code, "message": err.message}) + "\n")
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
