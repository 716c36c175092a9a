"""Command line entry point.

Subcommands: validate, construct, verify, example, transform.  Exit status
is 0 on pass, 1 on verification failure or module error, 2 on config error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import ConfigError
from .gausspoly import hermite_family
from .model import build_generator, compute_weight_data, validate_phase_triple
from .pipeline import (
    RunConfig,
    StageFailure,
    encode_gauss_poly,
    encode_matrix,
    run_example,
    run_verify,
)
from .transform import QuadSpec, TestFunction, transform

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _emit(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_validate(args) -> int:
    config = RunConfig.from_json(args.config)
    pt = validate_phase_triple(config.A, config.B, config.C)
    wd = compute_weight_data(pt)
    _emit(
        {
            "n": pt.n,
            "c_phi": pt.c_phi,
            "det_B_abs": float(abs(np.linalg.det(pt.B))),
            "C_I_eigenvalues": [float(v) for v in np.linalg.eigvalsh(pt.C_I)],
            "lambda": [float(v) for v in wd.lam],
            "valid": True,
        },
        args.out,
    )
    return EXIT_PASS


def _override_rho_fraction(config: RunConfig, value) -> RunConfig:
    if value is None:
        return config
    if not 0.0 < value < 1.0:
        raise ConfigError(
            "--rho-fraction: must lie strictly inside (0,1) so that 0<rho<lambda0"
        )
    return RunConfig(**{**config.__dict__, "rho_fraction": float(value)})


def _cmd_construct(args) -> int:
    config = _override_rho_fraction(RunConfig.from_json(args.config), args.rho_fraction)
    pt = validate_phase_triple(config.A, config.B, config.C)
    wd = compute_weight_data(pt)
    gen = build_generator(wd, config.rho_fraction * wd.lam0, config.X)
    payload = {
        "n": pt.n,
        "rho2": gen.rho2,
        "mu2": [float(v * v) for v in gen.mu],
        "lambda": [float(v) for v in wd.lam],
        "Q": encode_matrix(gen.Q),
        "S": encode_matrix(gen.S),
        "S_plus_Q": encode_matrix(gen.SQ),
        "xi_coeff": encode_matrix(gen.xi_coeff),
    }
    if args.family is not None:
        if args.family < 0:
            raise ConfigError("--family: must be a nonnegative degree")
        fam = hermite_family(wd, gen, args.family)
        payload["family"] = {
            ",".join(map(str, alpha)): encode_gauss_poly(member)
            for alpha, member in sorted(fam.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        }
    _emit(payload, args.out)
    return EXIT_PASS


def _cmd_verify(args) -> int:
    config = _override_rho_fraction(RunConfig.from_json(args.config), args.rho_fraction)
    if args.max_degree is not None:
        config = RunConfig(**{**config.__dict__, "max_degree": args.max_degree})
    report = run_verify(config)
    _emit(report.to_dict(), args.out)
    return EXIT_PASS if report.overall_pass else EXIT_FAIL


def _cmd_example(args) -> int:
    report = run_example(
        args.name, args.s, max_degree=args.max_degree, nodes=args.nodes
    )
    _emit(report.to_dict(), args.out)
    return EXIT_PASS if report.overall_pass else EXIT_FAIL


def _parse_points(text: str, n: int) -> list[np.ndarray]:
    points = []
    for chunk in text.split(";"):
        parts = chunk.strip().split()
        if len(parts) != n:
            raise ConfigError(
                f"--z: point {chunk!r} must have {n} whitespace-separated components"
            )
        comps = []
        for part in parts:
            pieces = part.split(",")
            if len(pieces) != 2:
                raise ConfigError(f"--z: component {part!r} must be re,im")
            try:
                comps.append(complex(float(pieces[0]), float(pieces[1])))
            except ValueError as exc:
                raise ConfigError(f"--z: component {part!r} is not numeric") from exc
        points.append(np.array(comps))
    return points


def _cmd_transform(args) -> int:
    config = RunConfig.from_json(args.config)
    pt = validate_phase_triple(config.A, config.B, config.C)
    try:
        alpha = tuple(int(v) for v in args.hermite.split(","))
    except ValueError as exc:
        raise ConfigError(f"--hermite: {args.hermite!r} is not a multi-index") from exc
    if len(alpha) != pt.n or any(a < 0 for a in alpha):
        raise ConfigError(f"--hermite: expected {pt.n} nonnegative integers")
    u = TestFunction.hermite_basis(alpha)
    quad = QuadSpec(nodes=args.nodes or config.nodes)
    rows = []
    for z in _parse_points(args.z, pt.n):
        value = transform(pt, u, z, quad)
        rows.append(
            {
                "z": [[float(c.real), float(c.imag)] for c in z],
                "value": [float(value.real), float(value.imag)],
            }
        )
    _emit({"hermite": list(alpha), "points": rows}, args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbhermite",
        description=(
            "Construct weighted spaces of entire functions from a matrix "
            "triple, build their Hermite-type generator families, and verify "
            "the algebraic and analytic identities numerically."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a defining triple")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("construct", help="build generator matrices")
    p.add_argument("--config", required=True)
    p.add_argument("--rho-fraction", type=float, default=None)
    p.add_argument("--family", type=int, default=None,
                   help="also emit family members up to this total degree")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_construct)

    p = sub.add_parser("verify", help="run the full verification suite")
    p.add_argument("--config", required=True)
    p.add_argument("--rho-fraction", type=float, default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("example", help="reproduce a golden example family")
    p.add_argument("--name", required=True, choices=("em", "ghs"))
    p.add_argument("--s", required=True, type=float)
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_example)

    p = sub.add_parser("transform", help="evaluate the transform at points")
    p.add_argument("--config", required=True)
    p.add_argument("--hermite", default="0", help="comma-separated multi-index")
    p.add_argument("--z", required=True, help="points 're,im re,im; re,im ...'")
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_transform)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageFailure as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as exc:  # noqa: BLE001 - surface module errors as failures
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
