"""Command-line front end: mesh generation, spectra, verification, convergence.

Subcommands: ``mesh``, ``spectrum``, ``verify``, ``converge``. Exit codes are
a stable contract: 0 success/pass, 1 usage or configuration error, 2
verification or solver failure. The environment variable ``HODGELAB_SEED``
overrides the configured seed. ``verify`` reads an optional JSON RunConfig
(see :mod:`hodgelab.config`, which owns the RunConfig type); flags override
config values, and the defaults reproduce the acceptance setup exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import curvature as curvature_mod
from . import exterior, mesh as mesh_mod, spectral, verify as verify_mod
from .config import ConfigError, RunConfig, Tolerances, default_config
from .mesh import MeshError, SurfaceSpec

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _surface_from_args(args) -> SurfaceSpec:
    if args.kind == "icosphere":
        return SurfaceSpec(kind="icosphere", level=args.level,
                           radius=args.radius if args.radius is not None else 1.0)
    if args.a is None or args.c is None:
        raise MeshError("spheroid needs --a and --c")
    return SurfaceSpec(kind="spheroid", level=args.level, a=args.a, c=args.c)


def _add_surface_flags(parser, require_level=True):
    parser.add_argument("--kind", choices=["icosphere", "spheroid"],
                        default="icosphere")
    parser.add_argument("--level", type=int, required=require_level)
    parser.add_argument("--radius", type=float, default=None)
    parser.add_argument("--a", type=float, default=None)
    parser.add_argument("--c", type=float, default=None)


def _seed(args_seed: int | None, config_seed: int = 0) -> int:
    env = os.environ.get("HODGELAB_SEED")
    if env is not None:
        return int(env)
    if args_seed is not None:
        return args_seed
    return config_seed


def cmd_mesh(args) -> int:
    try:
        surface = _surface_from_args(args)
        built = mesh_mod.build_surface(surface)
    except (MeshError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outcome = mesh_mod.validate(built)
    print(f"V={built.n_vertices} E={built.n_edges} F={built.n_faces}")
    for name, ok in outcome.checks.items():
        print(f"  {name}: {'ok' if ok else 'FAIL'}")
    if outcome.genus is not None:
        print(f"  genus: {outcome.genus}")
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(mesh_mod.export_off(built))
        print(f"wrote {args.out}")
    return EXIT_OK if outcome.ok else EXIT_FAILURE


def _spectrum_rows(result):
    group_of = {}
    for gi, g in enumerate(result.groups):
        for idx in g.indices:
            group_of[idx] = gi
    return [
        (i, float(result.eigenvalues[i]), float(result.residuals[i]), group_of[i])
        for i in range(len(result.eigenvalues))
    ]


def cmd_spectrum(args) -> int:
    if args.form not in (0, 1):
        print(f"error: unsupported form degree {args.form}", file=sys.stderr)
        return EXIT_USAGE
    try:
        surface = _surface_from_args(args)
        built = mesh_mod.build_surface(surface)
    except (MeshError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    seed = _seed(args.seed)
    try:
        if args.form == 0:
            A, B = exterior.laplacian0(built)
            result = spectral.solve_lowest(
                A, B, args.count, args.tol, seed=seed,
                known_kernel=np.ones(built.n_vertices),
            )
        else:
            result, _ = verify_mod.oneform_spectrum_hodge_split(
                built, args.count, args.tol, seed=seed
            )
    except (exterior.ExteriorError, spectral.SpectralError, verify_mod.VerifyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, spectral.ConvergenceError):
            print(f"best residuals: {exc.residuals}", file=sys.stderr)
        return EXIT_FAILURE
    rows = _spectrum_rows(result)
    lines = ["index,eigenvalue,residual,group"]
    lines += [f"{i},{ev:.12g},{res:.3g},{grp}" for i, ev, res, grp in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _format_report_table(report: dict) -> str:
    lines = []
    meshinfo = report.get("mesh") or {}
    lines.append(
        f"mesh: {meshinfo.get('kind')} level {meshinfo.get('level')} "
        f"V={meshinfo.get('vertices')} E={meshinfo.get('edges')} "
        f"F={meshinfo.get('faces')}"
    )
    curv = report.get("curvature") or {}
    if curv:
        lines.append(
            f"curvature: rho={curv.get('rho'):.6g} P={curv.get('P'):.6g} "
            f"(exact {curv.get('rho_exact'):.6g}..{curv.get('P_exact'):.6g}, "
            f"Gauss-Bonnet err {curv.get('gauss_bonnet_error'):.1e})"
        )
    for kind in ("scalar", "oneform"):
        spec = (report.get("spectra") or {}).get(kind)
        if spec:
            groups = ", ".join(
                f"{g['eigenvalue']:.5g} x{g['multiplicity']}" for g in spec["groups"]
            )
            lines.append(f"{kind} spectrum: {groups}")
    header = (
        f"{'field':18s} {'class':9s} {'lambda':>9s} {'eigres':>9s} "
        f"{'bounds':30s} {'yano':>9s} {'lich':>9s}"
    )
    lines.append(header)
    for f in report.get("fields", []):
        b = f.get("bounds") or {}
        if b.get("note") == "hypothesis Δω = λω violated":
            btxt = "skipped: hypothesis violated"
        elif b.get("mode") == "projective":
            printed = "INCONSISTENT" if b.get("note") == "inconsistent as printed" \
                else ("ok" if b.get("satisfied_printed") else "violated")
            btxt = f"proj {b.get('attainment')}/printed → {printed}"
        elif b.get("mode") == "conformal":
            btxt = f"conf {b.get('attainment')}"
        else:
            btxt = "-"
        def num(x):
            return f"{x:9.3g}" if isinstance(x, float) else f"{'-':>9s}"
        idents = f.get("identities") or {}
        lines.append(
            f"{f['name']:18s} {str(f.get('class')):9s} {num(f.get('lambda'))} "
            f"{num(f.get('eigenform_residual'))} {btxt:30s} "
            f"{num(idents.get('yano_2_2'))} {num(idents.get('lichnerowicz_3_2'))}"
        )
    if any(
        (f.get("bounds") or {}).get("note") == "inconsistent as printed"
        for f in report.get("fields", [])
    ):
        lines.append("projective upper (printed): INCONSISTENT (empty interval); "
                     "rederived constant used for the pass criterion")
    for rec in report.get("multiplicity", []):
        lines.append(
            f"multiplicity[{rec['algebra']}]: count {rec['count']} <= bound "
            f"{rec['bound']} ({'equality' if rec['equality'] else 'strict'})"
        )
    oracle = report.get("oracle", [])
    if oracle:
        bad = sum(1 for r in oracle if not r["pass"])
        lines.append(f"exact oracle: {len(oracle) - bad}/{len(oracle)} checks pass")
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    for fail in report.get("failures", []):
        lines.append(f"FAILURE: {fail}")
    lines.append(f"overall: {'PASS' if report.get('pass') else 'FAIL'}")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    try:
        if args.config:
            with open(args.config) as fh:
                data = json.load(fh)
            cfg = RunConfig.from_json_dict(data)
        else:
            cfg = default_config()
        overrides = {}
        if args.level is not None or args.kind is not None:
            kind = args.kind or cfg.surface.kind
            level = args.level if args.level is not None else cfg.surface.level
            if kind == "icosphere":
                surface = SurfaceSpec(kind=kind, level=level,
                                      radius=args.radius or cfg.surface.radius or 1.0)
            else:
                surface = SurfaceSpec(kind=kind, level=level,
                                      a=args.a or cfg.surface.a,
                                      c=args.c or cfg.surface.c)
            overrides["surface"] = surface
        if args.eigenpairs is not None:
            overrides["eigenpairs"] = args.eigenpairs
        seed = _seed(args.seed, cfg.seed)
        if overrides or seed != cfg.seed:
            cfg = RunConfig(
                surface=overrides.get("surface", cfg.surface),
                eigenpairs=overrides.get("eigenpairs", cfg.eigenpairs),
                levels=cfg.levels,
                fields=cfg.fields,
                tolerances=cfg.tolerances,
                seed=seed,
                report_path=cfg.report_path,
            )
    except (OSError, json.JSONDecodeError, ConfigError, MeshError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = verify_mod.run_suite(cfg)
    out_path = args.out or cfg.report_path
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(report, fh, indent=1, default=float)
            fh.write("\n")
    print(_format_report_table(report))
    return EXIT_OK if report["pass"] else EXIT_FAILURE


def cmd_converge(args) -> int:
    try:
        levels = [int(tok) for tok in args.levels.split(",") if tok.strip()]
    except ValueError:
        print("error: --levels expects a comma-separated integer list",
              file=sys.stderr)
        return EXIT_USAGE
    if len(levels) < 2:
        print("error: convergence study needs at least 2 levels", file=sys.stderr)
        return EXIT_USAGE
    ordered = sorted(levels)
    reordered = ordered != levels
    seed = _seed(args.seed)
    rows = []
    for level in ordered:
        try:
            surface = SurfaceSpec(kind=args.kind, level=level,
                                  radius=args.radius if args.radius is not None else 1.0,
                                  a=args.a, c=args.c)
            built = mesh_mod.build_surface(surface)
            if args.form == 0:
                A, B = exterior.laplacian0(built)
                result = spectral.solve_lowest(
                    A, B, args.count, args.tol, seed=seed,
                    known_kernel=np.ones(built.n_vertices),
                )
            else:
                result, _ = verify_mod.oneform_spectrum_hodge_split(
                    built, args.count, args.tol, seed=seed
                )
        except (MeshError, exterior.ExteriorError, spectral.SpectralError,
                verify_mod.VerifyError) as exc:
            print(f"error at level {level}: {exc}", file=sys.stderr)
            return EXIT_FAILURE
        nearest = min(result.groups,
                      key=lambda g: abs(g.representative - args.target))
        lam = nearest.representative
        rows.append((level, args.target, lam, abs(lam - args.target)))
    lines = ["level,target,lambda_hat,abs_error"]
    lines += [f"{lv},{tg:.12g},{lam:.12g},{err:.6g}" for lv, tg, lam, err in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    if reordered:
        print("note: levels were reordered ascending")
    errors = [row[3] for row in rows]
    monotone = all(errors[i + 1] < errors[i] * (1.0 + args.slack)
                   for i in range(len(errors) - 1))
    if not monotone:
        print("error: eigenvalue error is not monotonically decreasing",
              file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="hodgelab",
                     description="Spectral-geometry verification lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mesh = sub.add_parser("mesh", help="generate and validate a mesh")
    _add_surface_flags(p_mesh)
    p_mesh.add_argument("--out", default=None, help="OFF output path")
    p_mesh.set_defaults(func=cmd_mesh)

    p_spec = sub.add_parser("spectrum", help="lowest Laplacian eigenvalues")
    _add_surface_flags(p_spec)
    p_spec.add_argument("--form", type=int, default=0)
    p_spec.add_argument("--count", type=int, default=16)
    p_spec.add_argument("--tol", type=float, default=1e-6)
    p_spec.add_argument("--seed", type=int, default=None)
    p_spec.add_argument("--out", default=None, help="CSV output path")
    p_spec.set_defaults(func=cmd_spectrum)

    p_ver = sub.add_parser("verify", help="run the verification suite")
    p_ver.add_argument("--config", default=None, help="JSON RunConfig path")
    p_ver.add_argument("--kind", choices=["icosphere", "spheroid"], default=None)
    p_ver.add_argument("--level", type=int, default=None)
    p_ver.add_argument("--radius", type=float, default=None)
    p_ver.add_argument("--a", type=float, default=None)
    p_ver.add_argument("--c", type=float, default=None)
    p_ver.add_argument("--eigenpairs", type=int, default=None)
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--out", default=None, help="JSON report path")
    p_ver.set_defaults(func=cmd_verify)

    p_conv = sub.add_parser("converge", help="eigenvalue convergence study")
    p_conv.add_argument("--levels", required=True,
                        help="comma-separated subdivision levels")
    p_conv.add_argument("--kind", choices=["icosphere", "spheroid"],
                        default="icosphere")
    p_conv.add_argument("--radius", type=float, default=None)
    p_conv.add_argument("--a", type=float, default=None)
    p_conv.add_argument("--c", type=float, default=None)
    p_conv.add_argument("--form", type=int, default=0, choices=[0, 1])
    p_conv.add_argument("--count", type=int, default=16)
    p_conv.add_argument("--target", type=float, default=2.0)
    p_conv.add_argument("--tol", type=float, default=1e-6)
    p_conv.add_argument("--slack", type=float, default=0.0)
    p_conv.add_argument("--seed", type=int, default=None)
    p_conv.add_argument("--out", default=None, help="CSV output path")
    p_conv.set_defaults(func=cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except mesh_mod.ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MeshError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
