"""Command-line front end.

Commands:
    grow       sample + grow a surface, export OBJ (and quantities CSV)
    transform  christoffel or darboux of a grown surface, export OBJ
    converge   convergence study against the built-in smooth reference
    check      run the invariant suites on a grown surface

Exit codes: 0 success, 2 usage or configuration error, 3 numerical
degeneracy.  ISOGROW_THREADS caps per-mesh parallelism in ``converge``.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bjorling import derive_cauchy_data, sample_initial_strip
from .config import Settings, bjorling_from_settings, load_config
from .errors import ConfigError, IsogrowError
from .geometry import check_quad
from .growth import grow
from .harness import emit_report, run_convergence
from .meshio import write_obj
from .quantities import export_quantities_csv, extract, frame_relation_residuals, gc_residuals
from .smooth import builtin_surface
from .transforms import (christoffel_closedness, christoffel_discrete,
                         darboux_cross_ratio_audit, darboux_discrete)

USAGE_ERROR = 2
NUMERICAL_ERROR = 3


def _add_common(p):
    p.add_argument("--config", default=None, help="TOML config file")
    p.add_argument("--surface", default=None,
                   help="cylinder | sphere_mercator | user_curve (config)")
    p.add_argument("--r", type=float, default=None, help="data half-width")
    p.add_argument("--h", type=float, default=None, help="target eta height")
    p.add_argument("--eps", type=float, default=None, help="mesh width")


def _settings_from(args) -> Settings:
    settings = load_config(args.config)
    for key in ("surface", "r", "h", "eps"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(settings, key, val)
    for key in ("out", "export_quantities", "kind", "C"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(settings, key, val)
    if getattr(args, "seed", None) is not None:
        parts = str(args.seed).split(",")
        if len(parts) != 3:
            raise ConfigError("--seed expects x,y,z")
        settings.seed = tuple(float(c) for c in parts)
    if getattr(args, "eps_list", None):
        settings.eps_list = [float(e) for e in str(args.eps_list).split(",")]
    return settings


def _validated(settings: Settings):
    if settings.eps is not None and settings.h is not None and settings.eps >= settings.h:
        raise ConfigError(f"eps = {settings.eps} must be smaller than h = {settings.h}")
    if settings.eps >= settings.r:
        raise ConfigError("eps must be smaller than r")


def _grown(settings: Settings):
    data = bjorling_from_settings(settings)
    cd = derive_cauchy_data(data)
    strip = sample_initial_strip(cd, data, settings.eps)
    return data, grow(strip, settings.h)


def cmd_grow(args) -> int:
    settings = _settings_from(args)
    _validated(settings)
    _, result = _grown(settings)
    if result.degeneracies:
        print(f"growth stopped early at h = {result.achieved_h:.6g} "
              f"(degenerate at {result.degeneracies[0].center})", file=sys.stderr)
    out = settings.out or "surface.obj"
    counts = write_obj(result.surface, out)
    print(f"wrote {out}: {counts['vertices']} vertices, {counts['faces']} quads "
          f"(h_up {result.achieved_h_up:.6g}, h_down {result.achieved_h_down:.6g})")
    if settings.export_quantities:
        export_quantities_csv(extract(result.surface), settings.export_quantities)
        print(f"wrote {settings.export_quantities}")
    return 0


def cmd_transform(args) -> int:
    settings = _settings_from(args)
    _validated(settings)
    if settings.kind not in ("christoffel", "darboux"):
        raise ConfigError("--kind must be christoffel or darboux")
    _, result = _grown(settings)
    out = settings.out or f"{settings.kind}.obj"
    if settings.kind == "christoffel":
        dual = christoffel_discrete(result.surface)
        defect = christoffel_closedness(result.surface)
        counts = write_obj(dual, out)
        print(f"wrote {out}: {counts['vertices']} vertices, {counts['faces']} quads; "
              f"one-form closedness defect {defect:.3e}")
    else:
        if settings.C is None or settings.C == 0:
            raise ConfigError("darboux needs a nonzero --C")
        base = result.surface.positions.get((0, 0))
        seed = np.asarray(settings.seed, dtype=float) if settings.seed \
            else base + np.array([0.4, 0.25, 0.3])
        dres = darboux_discrete(result.surface, seed, settings.C)
        audit = darboux_cross_ratio_audit(result.surface, dres.surface, dres.gamma)
        counts = write_obj(dres.surface, out)
        print(f"wrote {out}: {counts['vertices']} vertices, {counts['faces']} quads; "
              f"cross-ratio defect {audit:.3e}, loop consistency {dres.consistency_defect:.3e}")
    return 0


def cmd_converge(args) -> int:
    settings = _settings_from(args)
    if settings.surface not in ("cylinder", "sphere_mercator"):
        raise ConfigError("converge needs a built-in reference surface")
    eps_list = settings.eps_list or [0.1, 0.05, 0.025]
    for eps in eps_list:
        if eps >= settings.h:
            raise ConfigError(f"eps = {eps} must be smaller than h = {settings.h}")
    data = bjorling_from_settings(settings)
    reference = builtin_surface(settings.surface)
    report = run_convergence(data, reference, eps_list, settings.h)
    base = settings.out or "convergence"
    if base.endswith(".csv"):
        base = base[:-4]
    paths = emit_report(report, base)
    print(f"wrote {paths[0]} and {paths[1]}")
    print(f"orders: F {report.fitted_order_F:.3f}, Fx {report.fitted_order_Fx:.3f}, "
          f"Fy {report.fitted_order_Fy:.3f}")
    return 0


def cmd_check(args) -> int:
    settings = _settings_from(args)
    _validated(settings)
    _, result = _grown(settings)
    surface = result.surface
    worst = 0.0
    for center in surface.complete_quad_centers():
        rep = check_quad(*surface.corner_points(center))
        worst = max(worst, rep.planarity_residual, rep.concyclicity_residual,
                    rep.cr_residual)
    q = extract(surface)
    gc = gc_residuals(q)
    fr = frame_relation_residuals(surface, q)
    print(f"conformal-square worst residual: {worst:.3e}")
    print(f"dual-expression defects: " +
          ", ".join(f"{k} {v:.3e}" for k, v in sorted(q.defects.items())))
    print(f"gd1 {gc.r_gd1:.3e}  gd1a {gc.r_gd1a:.3e}  gd2 {gc.r_gd2:.3e}  "
          f"gd3 {gc.r_gd3:.3e}  defiso {gc.r_defiso:.3e}")
    print(f"frame relations: recon {max(fr.recon_x, fr.recon_y):.3e}  "
          f"reconu {max(fr.reconu_x, fr.reconu_y):.3e}  "
          f"recona {fr.recona:.3e}  reconb {fr.reconb:.3e}")
    ok = (worst < 1e-10 and gc.r_gd1 < 1e-12 and max(fr.recona, fr.reconb) < 1e-9)
    print("check:", "PASS" if ok else "FAIL")
    return 0 if ok else NUMERICAL_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isogrow",
                                     description="discrete isothermic surface toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grow", help="grow a surface and export OBJ")
    _add_common(p)
    p.add_argument("--out", default=None)
    p.add_argument("--export-quantities", dest="export_quantities", default=None)
    p.set_defaults(func=cmd_grow)

    p = sub.add_parser("transform", help="christoffel or darboux transform")
    _add_common(p)
    p.add_argument("--kind", default=None)
    p.add_argument("--C", dest="C", type=float, default=None)
    p.add_argument("--seed", default=None, help="x,y,z")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("converge", help="convergence study")
    _add_common(p)
    p.add_argument("--eps-list", dest="eps_list", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("check", help="invariant suites on a grown surface")
    _add_common(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except IsogrowError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
