"""Command-line front end.

Subcommands:

    verify    run the monoid/groupoid checks on a built-in or JSON monoid
    poisson   extract the bivector and source/target maps
    compose   evaluate a stationary-phase composition at given points
    morphism  test a candidate morphism between two monoids

Exit codes: 0 all checks passed, 1 a check failed or the numerics broke
down (non-convergence, degenerate phase), 2 malformed input.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import serialize
from .compose import DEFAULT_NEWTON, CompositionError, NewtonOptions, compose
from .genfun import GenFun, NormalizationError, identity_genfun
from .grids import sample_ball, sample_box
from .monoids import (LieStructure, Order2GateError, PolyPoisson, abelian_monoid,
                      kontsevich_monoid, lie_monoid, symplectic_monoid)
from .verify import (check_associativity, check_groupoid, check_jacobi,
                     check_morphism, check_poisson_map, check_unit,
                     poisson_bivector, source_target)


class UserInputError(Exception):
    pass


DEFAULT_TOLS = {
    "unit": 1e-10,
    "associativity": 1e-9,
    "source-poisson": 1e-9,
    "target-anti-poisson": 1e-9,
    "source-target-commute": 1e-9,
    "jacobi": 1e-10,
    "morphism": 1e-9,
    "poisson-map": 1e-8,
}


# --------------------------------------------------------------------------
# Input construction
# --------------------------------------------------------------------------

def _structure(name: str) -> LieStructure:
    if name == "so3":
        return LieStructure.so3()
    if name == "heisenberg":
        return LieStructure.heisenberg()
    return serialize.load_structure(name)


def _bivector(name: str) -> PolyPoisson:
    if name in ("so3", "heisenberg"):
        return PolyPoisson.linear_from_structure(_structure(name))
    return serialize.load_poisson(name)


def build_monoid(args) -> GenFun:
    """Monoid selection shared by verify/poisson: --monoid PATH or --builtin."""
    if getattr(args, "monoid", None):
        S = serialize.load_genfun(args.monoid)
        if S.m != 2 * S.n:
            raise UserInputError(
                f"{args.monoid}: monoid genfun needs m = 2n, got m={S.m}, n={S.n}")
        return S
    b = getattr(args, "builtin", None)
    if b is None:
        raise UserInputError("choose a monoid with --builtin or --monoid")
    if b == "symplectic":
        return symplectic_monoid(args.d)
    if b == "identity":
        return abelian_monoid(args.d)
    if b == "lie":
        return lie_monoid(_structure(args.lie), trunc=args.trunc)
    if b == "kontsevich":
        if args.alpha is None:
            raise UserInputError("--builtin kontsevich needs --alpha (name or JSON path)")
        weights = None
        if args.weights is not None:
            weights = tuple(_parse_floats(args.weights, "--weights", 2))
        return kontsevich_monoid(_bivector(args.alpha), eps=args.eps,
                                 order=args.order, weights=weights)
    raise UserInputError(f"unknown builtin monoid {b!r}")


def parse_genfun_source(token: str) -> GenFun:
    """A genfun argument: a JSON path or a builtin:kind[:arg[:arg]] token."""
    if not token.startswith("builtin:"):
        return serialize.load_genfun(token)
    parts = token.split(":")[1:]
    kind = parts[0] if parts else ""
    rest = parts[1:]
    try:
        if kind == "identity":
            return identity_genfun(int(rest[0]) if rest else 2)
        if kind == "abelian":
            return abelian_monoid(int(rest[0]) if rest else 2)
        if kind == "symplectic":
            return symplectic_monoid(int(rest[0]) if rest else 2)
        if kind == "lie":
            if not rest:
                raise UserInputError("builtin:lie needs a structure name, e.g. builtin:lie:so3")
            trunc = int(rest[1]) if len(rest) > 1 else 4
            return lie_monoid(_structure(rest[0]), trunc=trunc)
    except (ValueError, IndexError) as exc:
        raise UserInputError(f"bad builtin token {token!r}: {exc}") from exc
    raise UserInputError(f"unknown builtin token {token!r}")


def _parse_floats(text, what, expect=None):
    try:
        vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise UserInputError(f"{what}: expected comma-separated numbers, got {text!r}") from exc
    if expect is not None and len(vals) != expect:
        raise UserInputError(f"{what}: expected {expect} numbers, got {len(vals)}")
    return vals


def _parse_tols(pairs):
    tols = dict(DEFAULT_TOLS)
    for item in pairs or []:
        if "=" not in item:
            raise UserInputError(f"--tol expects AXIOM=VALUE, got {item!r}")
        name, _, val = item.partition("=")
        name = name.strip()
        if name not in tols:
            raise UserInputError(
                f"unknown axiom {name!r} in --tol (choose from {', '.join(tols)})")
        try:
            tols[name] = float(val)
        except ValueError as exc:
            raise UserInputError(f"--tol {item!r}: bad number") from exc
    return tols


def _newton_options(args) -> NewtonOptions:
    if getattr(args, "newton_tol", None) is None:
        return DEFAULT_NEWTON
    return NewtonOptions(tol=args.newton_tol)


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def _config_dict(args, keys):
    out = {"command": args.command}
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def _finish(reports, args, config, extra=None) -> int:
    flat = []
    for r in reports:
        flat.extend(r if isinstance(r, (list, tuple)) else [r])
    for r in flat:
        print(r.summary_line())
    passed = all(r.passed for r in flat)
    print("overall:", "pass" if passed else "FAIL")
    if args.out:
        doc = serialize.reports_to_dict(flat, config=config, extra=extra)
        serialize.dump(doc, args.out)
        print(f"report written to {args.out}")
    return 0 if passed else 1


def cmd_verify(args) -> int:
    S = build_monoid(args)
    tols = _parse_tols(args.tol)
    opts = _newton_options(args)
    d, n, seed = S.n, args.grid_n, args.seed
    ps = sample_ball(n, d, args.p_radius, seed)
    xs = sample_box(n, d, -args.x_box, args.x_box, seed + 1)
    p3s = sample_ball(n, 3 * d, args.p_radius, seed + 2)
    axs = sample_box(n, d, -args.x_box, args.x_box, seed + 3)
    jxs = sample_box(n, d, -args.x_box, args.x_box, seed + 4)

    reports = [check_unit(S, ps, xs, tols["unit"])]
    reports.append(check_associativity(S, p3s, axs, tols["associativity"], opts))
    g3 = check_groupoid(S, ps, xs, min(tols["source-poisson"],
                                       tols["target-anti-poisson"],
                                       tols["source-target-commute"]))
    for rep, name in zip(g3, ("source-poisson", "target-anti-poisson",
                              "source-target-commute")):
        rep.tol = tols[name]
        rep.failures = [f for f in rep.failures if f["residual"] > tols[name]]
    reports.extend(g3)
    reports.append(check_jacobi(S, jxs, tols["jacobi"]))

    config = _config_dict(args, ("builtin", "monoid", "d", "lie", "trunc", "alpha",
                                 "eps", "order", "grid_n", "p_radius", "x_box", "seed"))
    config["tol"] = {k: tols[k] for k in DEFAULT_TOLS if k not in ("morphism", "poisson-map")}
    extra = {}
    fit = getattr(S, "order2_fit", None)
    if fit is not None:
        extra["order2_gate"] = {"c1": fit.c1, "c2": fit.c2, "floor": fit.floor,
                                "n_rows": fit.n_rows, "passed": fit.passed}
    print(f"monoid: {S.label}  (d={S.n})")
    return _finish(reports, args, config, extra or None)


def cmd_poisson(args) -> int:
    S = build_monoid(args)
    d, seed = S.n, args.seed
    field = poisson_bivector(S)
    gm = source_target(S)
    if args.at_x:
        xs = np.array([_parse_floats(t, "--at-x", d) for t in args.at_x])
    else:
        xs = sample_box(args.grid_n, d, -args.x_box, args.x_box, seed + 1)
    ps = sample_ball(min(args.grid_n, len(xs)), d, args.p_radius, seed)

    alpha_rows = []
    for x in xs:
        a = field.matrix(x)
        entries = [[i, j, float(a[i, j])] for i in range(d) for j in range(i + 1, d)]
        alpha_rows.append({"x": [float(v) for v in x], "entries": entries})
    st_rows = []
    for p, x in zip(ps, xs):
        st_rows.append({
            "p": [float(v) for v in p],
            "x": [float(v) for v in x],
            "source": [float(v) for v in gm.source(p, x)],
            "target": [float(v) for v in gm.target(p, x)],
        })

    print(f"monoid: {S.label}  (d={d})")
    x0 = xs[0]
    print(f"alpha at x = {np.array2string(np.asarray(x0), precision=6)}:")
    print(np.array2string(field.matrix(x0), precision=6, suppress_small=True))
    p0 = ps[0]
    print(f"source/target at p = {np.array2string(np.asarray(p0), precision=6)}, x above:")
    print("  s =", np.array2string(gm.source(p0, x0), precision=6))
    print("  t =", np.array2string(gm.target(p0, x0), precision=6))
    if args.out:
        config = _config_dict(args, ("builtin", "monoid", "d", "lie", "trunc", "alpha",
                                     "eps", "order", "grid_n", "p_radius", "x_box", "seed"))
        doc = {"config": config, "alpha": alpha_rows, "source_target": st_rows}
        serialize.dump(doc, args.out)
        print(f"report written to {args.out}")
    return 0


def cmd_compose(args) -> int:
    F = parse_genfun_source(args.f)
    G = parse_genfun_source(args.g)
    if F.m != G.n:
        raise UserInputError(
            f"cannot compose: F has m={F.m} but G has n={G.n} (need F.m == G.n)")
    C = compose(F, G, _newton_options(args))
    points = []
    if args.points:
        data = serialize.load(args.points)
        if not isinstance(data, list):
            raise UserInputError(f"{args.points}: expected a JSON list of points")
        for row in data:
            points.append((np.array([float(v) for v in row["p"]], dtype=float),
                           np.array([float(v) for v in row["x"]], dtype=float)))
    if args.p or args.x:
        if not (args.p and args.x):
            raise UserInputError("--p and --x must be given together")
        points.append((np.array(_parse_floats(args.p, "--p", C.m)),
                       np.array(_parse_floats(args.x, "--x", C.n))))
    if not points:
        raise UserInputError("give a point with --p/--x or --points FILE")

    rows = []
    for p, x in points:
        if p.shape != (C.m,) or x.shape != (C.n,):
            raise UserInputError(
                f"point has shape ({p.shape[0]}, {x.shape[0]}), need ({C.m}, {C.n})")
        j = C.eval_jet(p, x, 1)
        sp = C.stationary(p, x)
        rows.append({
            "p": [float(v) for v in p],
            "x": [float(v) for v in x],
            "value": float(j.value),
            "grad_p": [float(v) for v in j.grad[:C.m]],
            "grad_x": [float(v) for v in j.grad[C.m:]],
            "iterations": sp.iterations,
            "residual": sp.residual,
        })
        print(f"p = {np.array2string(p, precision=6)}  x = {np.array2string(x, precision=6)}")
        print(f"  value   = {j.value:.12g}")
        print(f"  grad_p  = {np.array2string(j.grad[:C.m], precision=8)}")
        print(f"  grad_x  = {np.array2string(j.grad[C.m:], precision=8)}")
        print(f"  newton: {sp.iterations} iterations, residual {sp.residual:.3e}")
    if args.out:
        doc = {"config": {"command": "compose", "f": args.f, "g": args.g},
               "points": rows}
        serialize.dump(doc, args.out)
        print(f"report written to {args.out}")
    return 0


def cmd_morphism(args) -> int:
    F = parse_genfun_source(args.f)
    S_M = parse_genfun_source(args.dom)
    S_N = parse_genfun_source(args.cod)
    for name, S in (("--dom", S_M), ("--cod", S_N)):
        if S.m != 2 * S.n:
            raise UserInputError(f"{name}: expected a monoid genfun (m = 2n)")
    d_M, d_N = S_M.n, S_N.n
    if F.m != d_M or F.n != d_N:
        raise UserInputError(
            f"morphism genfun must have m={d_M}, n={d_N}; got m={F.m}, n={F.n}")
    tols = _parse_tols(args.tol)
    opts = _newton_options(args)
    n, seed = args.grid_n, args.seed
    ps = sample_ball(n, 2 * d_M, args.p_radius, seed)
    xs = sample_box(n, d_N, -args.x_box, args.x_box, seed + 1)
    pxs = sample_box(n, d_N, -args.x_box, args.x_box, seed + 2)

    from .genfun import base_map
    reports = [check_morphism(F, S_M, S_N, ps, xs, tols["morphism"], opts),
               check_poisson_map(base_map(F), poisson_bivector(S_N),
                                 poisson_bivector(S_M), pxs, tols["poisson-map"])]
    config = _config_dict(args, ("f", "dom", "cod", "grid_n", "p_radius", "x_box", "seed"))
    config["tol"] = {k: tols[k] for k in ("morphism", "poisson-map")}
    print(f"morphism candidate: {F.label or args.f}  ({S_M.label} -> {S_N.label})")
    return _finish(reports, args, config)


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

def _add_monoid_flags(sp):
    sp.add_argument("--builtin", choices=("symplectic", "lie", "kontsevich", "identity"),
                    help="built-in monoid family")
    sp.add_argument("--monoid", help="path to a monoid genfun JSON")
    sp.add_argument("--d", type=int, default=2, help="dimension for symplectic/identity")
    sp.add_argument("--lie", default="so3",
                    help="structure constants: so3, heisenberg, or a JSON path")
    sp.add_argument("--trunc", type=int, default=4,
                    help="truncation order of the group law (1..4)")
    sp.add_argument("--alpha", help="bivector for kontsevich: so3, heisenberg, or JSON path")
    sp.add_argument("--eps", type=float, default=0.1, help="formal parameter value")
    sp.add_argument("--order", type=int, default=1, choices=(1, 2),
                    help="expansion order of the kontsevich monoid")
    sp.add_argument("--weights", help="override order-2 weights as 'c1,c2'")


def _add_grid_flags(sp):
    sp.add_argument("--grid-n", type=int, default=200, dest="grid_n",
                    help="sample count per check")
    sp.add_argument("--p-radius", type=float, default=0.1, dest="p_radius",
                    help="momentum ball radius")
    sp.add_argument("--x-box", type=float, default=1.0, dest="x_box",
                    help="base-point box half-width")
    sp.add_argument("--seed", type=int, default=0, help="grid scramble seed")


def _add_common(sp):
    sp.add_argument("--tol", action="append", metavar="AXIOM=VAL",
                    help="override a tolerance (repeatable)")
    sp.add_argument("--newton-tol", type=float, default=None, dest="newton_tol",
                    help="stationary-point solver tolerance")
    sp.add_argument("--out", help="write a JSON report here")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symgf",
        description="generating-function calculus for symplectic micromorphisms")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="run monoid/groupoid checks")
    _add_monoid_flags(sp)
    _add_grid_flags(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("poisson", help="extract bivector and source/target maps")
    _add_monoid_flags(sp)
    _add_grid_flags(sp)
    sp.add_argument("--at-x", action="append", metavar="X1,X2,...",
                    help="evaluate at this base point (repeatable)")
    sp.add_argument("--out", help="write a JSON report here")
    sp.set_defaults(func=cmd_poisson)

    sp = sub.add_parser("compose", help="stationary-phase composition at points")
    sp.add_argument("--f", required=True, help="outer genfun: JSON path or builtin:TOKEN")
    sp.add_argument("--g", required=True, help="inner genfun: JSON path or builtin:TOKEN")
    sp.add_argument("--p", help="momentum coordinates, comma-separated")
    sp.add_argument("--x", help="base coordinates, comma-separated")
    sp.add_argument("--points", help="JSON file with a list of {p, x} points")
    sp.add_argument("--newton-tol", type=float, default=None, dest="newton_tol")
    sp.add_argument("--out", help="write a JSON report here")
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("morphism", help="check a morphism between two monoids")
    sp.add_argument("--f", required=True, help="candidate morphism genfun")
    sp.add_argument("--dom", required=True, help="domain monoid (JSON path or builtin token)")
    sp.add_argument("--cod", required=True, help="codomain monoid (JSON path or builtin token)")
    _add_grid_flags(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_morphism)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except UserInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NormalizationError,) as exc:
        print(f"error: input genfun violates normalization: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Order2GateError as exc:
        print(f"weight fit gate failed: {exc}", file=sys.stderr)
        return 1
    except CompositionError as exc:
        print(f"composition failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
