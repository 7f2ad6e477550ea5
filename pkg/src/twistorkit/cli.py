"""twistor-kit command line: verification sweeps, Kerr solving, leaf
tracing with CSV/SVG/PNG output, group actions and boundary construction.

All reports are JSON.  The sampling seed defaults to the TWISTOR_SEED
environment variable (42 if unset); exit code 0 means every requested
check passed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, Optional, Tuple

import numpy as np

from .catalog import (
    CATALOG_KEYS,
    get_entry,
    named_surface,
    verify_entry,
    _DEFAULT_BOXES,
)
from .coords import INFINITY, Point4C, SliceSpec, stereo_inv
from .fieldexpr import (
    BranchSign,
    FieldExpr,
    ParseError,
    parse_expr,
    to_str,
)
from .groups import (
    BlockMatrix4,
    load_matrix,
    named_matrix,
    pushforward_mu,
    pushforward_scalar,
)
from .hyperbolic import (
    boundary_slice,
    chart_for,
    chart_sampler,
    ode_residual_report,
    offslice_spec,
    solve_superminimal,
)
from .kerr import (
    TwistorSurface,
    kerr_eval_all,
    kerr_field,
    load_surface,
    surfaces_proportional,
    transform_surface,
)
from .residuals import (
    EmptyDomain,
    SamplerSpec,
    check_alpha,
    check_boundary_orthogonality,
    check_harmonic_morphism,
    check_hc3,
    check_hermitian,
    check_hyperbolic_hm,
    check_sfr,
)
from .trace import csv_text, trace_leaves, write_png, write_svg
from .unify import UField

_MU_CONDITIONS = {"alpha", "hermitian", "sfr", "hm-euclid4", "hm-minkowski4", "cxhm"}
_PHI_CONDITIONS = {"hc3", "hyperbolic", "orthogonality",
                   "hm-euclid4", "hm-minkowski4", "cxhm"}


def _default_seed() -> int:
    return int(os.environ.get("TWISTOR_SEED", "42"))


def _emit(data: dict, out: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_complex(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return complex(parts[0].replace(" ", ""))
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot parse complex number from {text!r}")


def _parse_point(text: str) -> Point4C:
    comps = [complex(c.strip().replace(" ", "")) for c in text.split(",")]
    if len(comps) != 4:
        raise ValueError("--point needs x0,x1,x2,x3")
    return Point4C(*comps)


def _parse_box(text: str, nparams: int) -> Tuple[Tuple[float, float], ...]:
    chunks = text.split(";")
    ranges = []
    for ch in chunks:
        lo, hi = (float(v) for v in ch.split(","))
        ranges.append((lo, hi))
    if len(ranges) == 1:
        ranges = ranges * nparams
    if len(ranges) != nparams:
        raise ValueError(f"box needs 1 or {nparams} ranges")
    return tuple(ranges)


def _branch_of(text: str) -> BranchSign:
    if text in ("+", "plus"):
        return BranchSign.PLUS
    if text in ("-", "minus"):
        return BranchSign.MINUS
    raise ValueError("branch must be + or -")


def _adhoc_check(expr: FieldExpr, condition: str, box: Optional[str],
                 samples: int, seed: int, tol: Optional[float]):
    kind, default_box = _DEFAULT_BOXES[condition]
    slc = SliceSpec(kind)
    box_t = _parse_box(box, slc.nparams) if box else default_box
    sampler = SamplerSpec(slc, box_t, samples=samples, seed=seed)
    if condition == "hc3":
        return check_hc3(expr, sampler, tol)
    if condition == "alpha":
        return check_alpha(expr, sampler, tol)
    if condition == "hermitian":
        return check_hermitian(expr, sampler, tol)
    if condition == "sfr":
        return check_sfr(expr, sampler, tol)
    if condition == "hm-euclid4":
        return check_harmonic_morphism(expr, "euclid4", sampler, tol)
    if condition == "hm-minkowski4":
        return check_harmonic_morphism(expr, "minkowski4", sampler, tol)
    if condition == "cxhm":
        return check_harmonic_morphism(expr, "complex4", sampler, tol)
    if condition == "hyperbolic":
        return check_hyperbolic_hm(expr, sampler, a0=0.0, tol=tol)
    if condition == "orthogonality":
        return check_boundary_orthogonality(expr, sampler, tol)
    raise ValueError(f"unknown condition {condition!r}")


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    reports: Dict[str, dict] = {}
    try:
        if args.key:
            entry = get_entry(args.key)
            conds = list(entry.conditions) if args.condition == "all" else [args.condition]
            for cond in conds:
                if cond not in entry.conditions:
                    print(f"error: condition {cond!r} not applicable to {args.key!r}",
                          file=sys.stderr)
                    return 2
                rep = verify_entry(entry, cond, samples=args.samples, seed=seed,
                                   tol=args.tol)
                reports[cond] = rep.to_json()
        else:
            if args.condition == "all":
                print("error: --condition all needs a catalog key", file=sys.stderr)
                return 2
            if args.mu:
                if args.condition not in _MU_CONDITIONS:
                    print(f"error: condition {args.condition!r} does not apply to a mu field",
                          file=sys.stderr)
                    return 2
                expr = parse_expr(args.mu)
            elif args.phi:
                if args.condition not in _PHI_CONDITIONS:
                    print(f"error: condition {args.condition!r} does not apply to a phi field",
                          file=sys.stderr)
                    return 2
                expr = parse_expr(args.phi)
            else:
                print("error: give a catalog key, --mu or --phi", file=sys.stderr)
                return 2
            rep = _adhoc_check(expr, args.condition, args.box, args.samples, seed,
                               args.tol)
            reports[args.condition] = rep.to_json()
    except (KeyError, ValueError, ParseError, EmptyDomain) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    passed = all(r["pass"] for r in reports.values())
    _emit({
        "command": "verify",
        "key": args.key,
        "seed": seed,
        "samples": args.samples,
        "conditions": reports,
        "pass": passed,
    }, args.out)
    return 0 if passed else 1


def _resolve_surface(text: str) -> TwistorSurface:
    if os.path.exists(text):
        return load_surface(text)
    return named_surface(text)


def cmd_kerr(args) -> int:
    try:
        surface = _resolve_surface(args.surface)
        p = _parse_point(args.point)
        pairs = kerr_eval_all(surface, p)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.branch != "all":
        idx = 0 if args.branch in ("+", "plus") else -1
        pairs = [pairs[idx]]
    roots = []
    for w0, w1 in pairs:
        if abs(w0) < 1e-13 * max(1.0, abs(w1)):
            mu_repr = "infinity"
            u_vec = stereo_inv(INFINITY)
        else:
            mu = w1 / w0
            mu_repr = [mu.real, mu.imag]
            u_vec = stereo_inv(1j * mu) if abs(mu.imag * mu.real) < 1e30 else None
        roots.append({
            "pair": [[w0.real, w0.imag], [w1.real, w1.imag]],
            "mu": mu_repr,
            "U": list(u_vec) if u_vec is not None else None,
        })
    data = {
        "command": "kerr",
        "surface": surface.to_json(),
        "point": [[z.real, z.imag] for z in p.array()],
        "roots": roots,
    }
    if args.field:
        try:
            data["mu_field"] = {
                "plus": to_str(kerr_field(surface, BranchSign.PLUS)),
                "minus": to_str(kerr_field(surface, BranchSign.MINUS)),
            }
        except Exception as exc:
            data["mu_field"] = f"unavailable: {exc}"
    _emit(data, args.out)
    return 0


def _parse_leaves(text: Optional[str], x1: float,
                  default: Tuple[Tuple[float, float, float], ...]):
    if not text:
        if x1 != 0.0:
            return [(x1, s[1], s[2]) for s in default]
        return list(default)
    if ";" in text:
        seeds = []
        for chunk in text.split(";"):
            if not chunk.strip():
                continue
            vals = [float(v) for v in chunk.split(",")]
            if len(vals) != 3:
                raise ValueError("leaf triples need x1,x2,x3")
            seeds.append(tuple(vals))
        return seeds
    # a list of radii in the x2 direction at the requested x1; explicit
    # seed triples need semicolons ("x1,x2,x3;")
    return [(x1, r, 0.0) for r in (float(v) for v in text.split(","))]


def cmd_trace(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        entry = get_entry(args.key)
        if entry.trace is None:
            print(f"error: catalog entry {args.key!r} has no trace target",
                  file=sys.stderr)
            return 2
        spec = entry.trace
        t = spec.default_t if args.t is None else args.t
        ufield = spec.ufield(t)
        seeds = _parse_leaves(args.leaves, args.x1, spec.default_leaves)
        records = trace_leaves(ufield, seeds, args.step, args.steps)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    inv = spec.invariant(t)
    drifts = []
    for rec in records:
        vals = np.array([inv(row[1:]) for row in rec.points[:: max(1, len(rec.points) // 64)]])
        ref = vals[0]
        scale = max(1.0, abs(ref))
        drifts.append(float(np.max(np.abs(vals - ref)) / scale))
    out = args.out or f"trace-{args.key.replace(':', '_')}-t{t:g}.{args.format}"
    if args.format == "csv":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(csv_text(records))
    elif args.format == "svg":
        write_svg(records, out, axes=spec.plane)
    elif args.format == "png":
        write_png(records, out, axes=spec.plane)
    else:
        print(f"error: unknown format {args.format!r}", file=sys.stderr)
        return 2
    _emit({
        "command": "trace",
        "key": args.key,
        "t": t,
        "seed": seed,
        "step": args.step,
        "steps": args.steps,
        "leaves": [list(s) for s in seeds],
        "truncated": [rec.truncated for rec in records],
        "invariant_drift": drifts,
        "output": out,
    }, None)
    return 0


def _resolve_matrix(text: str) -> BlockMatrix4:
    if os.path.exists(text):
        return load_matrix(text)
    return named_matrix(text)


def cmd_transform(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        P = _resolve_matrix(args.matrix)
        entry = get_entry(args.apply_to)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    data: dict = {"command": "transform", "matrix": args.matrix,
                  "apply_to": args.apply_to, "seed": seed}
    ok = True
    if entry.surface is not None:
        moved = transform_surface(entry.surface, P.matrix(),
                                  name=f"{entry.surface.name}<-{args.matrix}")
        data["surface"] = moved.to_json()
        matches = []
        for key in CATALOG_KEYS:
            other = get_entry(key)
            if other.surface is None:
                continue
            same, defect = surfaces_proportional(moved, other.surface)
            if same:
                matches.append({"key": key, "defect": defect})
        data["surface_matches"] = matches
    if args.then_verify:
        reports = {}
        try:
            if entry.mu is not None:
                moved_mu = pushforward_mu(P, entry.mu)
                for cond in ("hermitian", "sfr"):
                    kind, box = entry.box_for(cond)
                    sampler = SamplerSpec(SliceSpec(kind), box,
                                          samples=args.samples, seed=seed)
                    rep = (check_hermitian if cond == "hermitian" else check_sfr)(
                        moved_mu, sampler)
                    reports[cond] = rep.to_json()
            elif entry.f3 is not None:
                moved_f = pushforward_scalar(P, entry.f3)
                kind, box = entry.box_for("hc3")
                sampler = SamplerSpec(SliceSpec(kind), box,
                                      samples=args.samples, seed=seed)
                reports["hc3"] = check_hc3(moved_f, sampler).to_json()
        except EmptyDomain as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        data["verify"] = reports
        ok = all(r["pass"] for r in reports.values()) if reports else True
    data["pass"] = ok
    _emit(data, args.out)
    return 0 if ok else 1


def cmd_boundary(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        a0 = _parse_complex(args.a0)
        branch = _branch_of(args.branch)
        chart = chart_for(args.surface, branch)
        sol = solve_superminimal(chart, a0, branch)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    phi = sol.phi
    data: dict = {
        "command": "boundary",
        "surface": args.surface,
        "a0": [a0.real, a0.imag],
        "branch": args.branch,
        "zeta_tilde": to_str(sol.zeta_tilde),
        "phi": to_str(phi),
        "boundary_slice_x0": [a0.real, a0.imag],
    }
    ok = True
    if args.emit in ("phi", "f"):
        off = SamplerSpec(offslice_spec(sol), ((0.25, 1.2),) * 4,
                          samples=args.samples, seed=seed)
        bnd = SamplerSpec(boundary_slice(sol), ((0.3, 1.2),) * 3,
                          samples=args.samples, seed=seed)
        reports = {
            "superminimal-ode": ode_residual_report(
                sol, chart_sampler((0.4, 1.1), (0.4, 1.1),
                                   samples=args.samples, seed=seed)).to_json(),
            "hyperbolic": check_hyperbolic_hm(phi, off).to_json(),
            "orthogonality": check_boundary_orthogonality(phi, bnd).to_json(),
            "hc3": check_hc3(phi, bnd).to_json(),
        }
        data["reports"] = reports
        ok = all(r["pass"] for r in reports.values())
    elif args.emit == "trace":
        slc = boundary_slice(sol)
        ufield = UField.from_first_integral(phi, slc, branch)
        seeds = _parse_leaves(args.leaves, 0.0,
                              ((0.3, 0.8, 0.2), (0.2, 1.1, -0.3), (-0.2, 0.9, 0.4)))
        records = trace_leaves(ufield, seeds, args.step, args.steps)
        out = args.out or f"boundary-{args.surface.replace(':', '_')}.{args.format}"
        if args.format == "csv":
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(csv_text(records))
        elif args.format == "svg":
            write_svg(records, out, axes=("x2", "x3"))
        else:
            write_png(records, out, axes=("x2", "x3"))
        data["output"] = out
        data["truncated"] = [rec.truncated for rec in records]
        _emit(data, None)
        return 0
    _emit(data, args.out if args.emit != "trace" else None)
    return 0 if ok else 1


def cmd_catalog(args) -> int:
    rows = []
    for key in CATALOG_KEYS:
        e = get_entry(key)
        rows.append({
            "key": key,
            "description": e.description,
            "conditions": list(e.conditions),
            "surface": e.surface.to_json() if e.surface else None,
            "traceable": e.trace is not None,
            "notes": e.notes,
        })
    _emit({"command": "catalog", "entries": rows}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twistor-kit",
        description="Numerical certificates and constructions for twistor "
                    "surfaces, shear-free ray congruences, conformal "
                    "foliations and hyperbolic harmonic morphisms.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run residual certificates")
    v.add_argument("key", nargs="?", help=f"catalog key, one of {', '.join(CATALOG_KEYS)}")
    v.add_argument("--mu", help="ad-hoc mu expression (infix syntax)")
    v.add_argument("--phi", help="ad-hoc phi expression (infix syntax)")
    v.add_argument("--condition", default="all",
                   help="condition id or 'all' (catalog keys only)")
    v.add_argument("--box", help="sampling box 'lo,hi' or 'lo,hi;lo,hi;...'")
    v.add_argument("--samples", type=int, default=500)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("kerr", help="solve the Kerr equation at a point")
    k.add_argument("--surface", required=True, help="surface key or JSON file")
    k.add_argument("--point", required=True, help="x0,x1,x2,x3 (complex entries allowed)")
    k.add_argument("--branch", default="all", choices=["+", "-", "all", "plus", "minus"])
    k.add_argument("--field", action="store_true",
                   help="also print the closed-form mu expression (degree <= 2)")
    k.add_argument("--out")
    k.set_defaults(func=cmd_kerr)

    t = sub.add_parser("trace", help="trace foliation leaves on a slice")
    t.add_argument("key")
    t.add_argument("--t", type=float, default=None, help="slice time")
    t.add_argument("--x1", type=float, default=0.0, help="x1 plane for radius leaves")
    t.add_argument("--leaves", help="'r1,r2,...' radii or 'x1,x2,x3;...' seed triples")
    t.add_argument("--step", type=float, default=0.005)
    t.add_argument("--steps", type=int, default=2000)
    t.add_argument("--format", default="csv", choices=["csv", "svg", "png"])
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--out")
    t.set_defaults(func=cmd_trace)

    tr = sub.add_parser("transform", help="apply a conformal transformation")
    tr.add_argument("--matrix", required=True,
                    help="named key (identity, inversion, dilation:L, "
                         "translation:t,x1,x2,x3, translation-r4:..., "
                         "lorentz-boost:L, cxsame) or JSON file")
    tr.add_argument("--apply-to", required=True, dest="apply_to")
    tr.add_argument("--then-verify", action="store_true", dest="then_verify")
    tr.add_argument("--samples", type=int, default=300)
    tr.add_argument("--seed", type=int, default=None)
    tr.add_argument("--out")
    tr.set_defaults(func=cmd_transform)

    b = sub.add_parser("boundary", help="hyperbolic harmonic morphism with "
                                        "prescribed boundary behaviour")
    b.add_argument("--surface", required=True,
                   help="robinson:s, quadric-radial, quadric-circles or quadric-coaxal")
    b.add_argument("--a0", default="0", help="translation parameter 're' or 're,im'")
    b.add_argument("--emit", default="phi", choices=["phi", "f", "trace"])
    b.add_argument("--branch", default="+", choices=["+", "-"])
    b.add_argument("--samples", type=int, default=300)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--leaves")
    b.add_argument("--step", type=float, default=0.005)
    b.add_argument("--steps", type=int, default=1500)
    b.add_argument("--format", default="csv", choices=["csv", "svg", "png"])
    b.add_argument("--out")
    b.set_defaults(func=cmd_boundary)

    c = sub.add_parser("catalog", help="list the example catalog")
    c.add_argument("--out")
    c.set_defaults(func=cmd_catalog)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
