"""Command-line entry point.  Every command prints JSON on stdout.

Errors are printed as ``{"error": <type>, "message": ...}`` on stderr with
exit code 2; ``verify`` exits 1 when an asserted identity fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import depth, detour, dynamics, rewrite
from .geometry import GeometryError, make_geometry
from .language import ExprSyntaxError
from .tensors import TensorSyntaxError, load_tensor
from .verify import SUITES, verify


class FlagError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(json.dumps({"error": "FlagError", "message": message}, sort_keys=True) + "\n")
        raise SystemExit(2)


def _signature(text: str | None):
    if text is None:
        return None
    try:
        p, q = (int(v) for v in text.split(","))
    except ValueError:
        raise FlagError(f"--signature expects p,q, got {text!r}") from None
    return (p, q)


def _geometry(args):
    sig = _signature(getattr(args, "signature", None))
    dim = args.dim
    if dim is None:
        if sig is None:
            raise FlagError("--dim or --signature is required")
        dim = sum(sig)
    if args.geometry == "hyperbolic" and sig is not None and sig[1] != 0:
        raise FlagError("hyperbolic geometry requires a Euclidean signature")
    return make_geometry(args.geometry, dim, sig)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _complexes(text: str) -> list[complex]:
    return [complex(v.replace(" ", "")) for v in text.split(",")]


def _tensor(args, geo):
    source = args.tensor
    if source.startswith("@"):
        with open(source[1:], encoding="utf-8") as fh:
            source = fh.read()
    psi = load_tensor(source, geo)
    if psi.geometry != geo:
        raise FlagError("tensor JSON does not match the requested geometry")
    return psi


# ---------------------------------------------------------------------------
# commands


def cmd_verify(args) -> tuple[dict, int]:
    geo = _geometry(args)
    report = verify(
        geo,
        suites=args.suite,
        seed=args.seed,
        trials=args.trials,
        max_rank=args.max_rank,
        max_degree=args.max_degree,
    )
    return report, 0 if report["pass"] else 1


def cmd_decompose(args) -> tuple[dict, int]:
    geo = _geometry(args)
    dec = depth.trace_decompose(_tensor(args, geo))
    return {"tensor": args.tensor, "components": dec.to_json()}, 0


def _curvature(args, geo=None):
    if args.curvature is not None:
        return Fraction(args.curvature)
    return 1 if geo is None else geo.sectional_curvature


def cmd_normalize(args) -> tuple[dict, int]:
    K = _curvature(args)
    nf = rewrite.normalize(args.expr, args.dim, K)
    degree = rewrite.ord_degree(nf)
    return {
        "expr": args.expr,
        "dim": args.dim,
        "curvature": str(K),
        "normal_form": nf.to_json(),
        "text": nf.to_text(),
        "pure_function": nf.is_pure_function(),
        "ord_degree": degree if isinstance(degree, int) else None,
    }, 0


def cmd_apply(args) -> tuple[dict, int]:
    geo = _geometry(args)
    psi = _tensor(args, geo)
    out = rewrite.apply_expr(args.expr, psi)
    return {"expr": args.expr, "input": psi.to_text(), "result": out.to_text(), "tensor": out.to_json()}, 0


def cmd_simulate(args) -> tuple[dict, int]:
    geo = _geometry(args)
    state = dynamics.PhaseState.make(_floats(args.x0), _floats(args.pi0), _complexes(args.z0))
    traj = dynamics.integrate_rk4(state, args.dt, args.steps, geo)
    every = max(1, args.sample_every)
    samples = traj[::every]
    if samples[-1] is not traj[-1]:
        samples.append(traj[-1])
    charges0 = dynamics.noether_charges(traj[0], geo)
    return {
        "config": {
            "geometry": geo.kind,
            "dim": geo.dim,
            "signature": list(geo.signature),
            "dt": args.dt,
            "steps": args.steps,
        },
        "initial_charges": {k: [v.real, v.imag] for k, v in charges0.items()},
        "states": [s.to_json() for s in samples],
        "drift": dynamics.drift_report(traj, geo),
    }, 0


def cmd_pochhammer(args) -> tuple[dict, int]:
    reports = [rewrite.pochhammer_report(m, n) for m in args.m for n in args.dim]
    return {"reports": reports}, 0


def cmd_detour(args) -> tuple[dict, int]:
    report = detour.explore_constraints(
        args.dim,
        max_rank=args.max_rank,
        seed=args.seed,
        trials=args.trials,
        signature=_signature(args.signature),
        max_degree=args.max_degree,
    )
    return report, 0


# ---------------------------------------------------------------------------
# parser


def _geo_flags(p, dim_required=False):
    p.add_argument("--geometry", choices=("flat", "hyperbolic"), default="flat")
    p.add_argument("--dim", type=int, required=dim_required)
    p.add_argument("--signature", help="p,q (flat only for q > 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lichnerowicz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run seeded identity suites")
    _geo_flags(p)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--max-rank", type=int, default=3)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--suite", action="append", choices=SUITES + ("all",))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="depth decomposition of a tensor")
    _geo_flags(p)
    p.add_argument("tensor", help="polynomial text, tensor JSON, or @file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("normalize", help="normal form of an operator word")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--expr", required=True)
    p.add_argument("--curvature", help="K in the box bracket (default 1)")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("apply", help="apply an operator word to a tensor")
    _geo_flags(p)
    p.add_argument("--expr", required=True)
    p.add_argument("tensor", help="polynomial text, tensor JSON, or @file")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("simulate", help="integrate the classical spinning geodesic")
    _geo_flags(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--pi0", required=True)
    p.add_argument("--z0", required=True, help="comma separated complex numbers, e.g. 1,0.5j")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--sample-every", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pochhammer", help="normal form of g^m tr^m against the closed formula")
    p.add_argument("--m", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--dim", type=int, nargs="+", default=[2, 3, 4])
    p.set_defaults(func=cmd_pochhammer)

    p = sub.add_parser("detour", help="constraint exploration for the detour operator")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--signature")
    p.add_argument("--max-rank", type=int, default=3)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--trials", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_detour)
    return parser


_HANDLED = (
    FlagError,
    GeometryError,
    ExprSyntaxError,
    TensorSyntaxError,
    depth.DenominatorSingularOnSpectrum,
    depth.BoxSymbolPresent,
    depth.DecompositionError,
    dynamics.BoundaryCrossing,
    detour.NonFlatGeometry,
    ValueError,
    OSError,
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and not args.suite:
        args.suite = ["all"]
    try:
        payload, code = args.func(args)
    except _HANDLED as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ExprSyntaxError) and exc.position is not None:
            err["position"] = exc.position
        if isinstance(exc, depth.DenominatorSingularOnSpectrum):
            err.update({"s": exc.s, "k": exc.k, "n": exc.n})
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
