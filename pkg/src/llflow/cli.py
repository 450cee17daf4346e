"""Command-line entry point: scenario runs and one-shot diagnostics.

Exit codes follow the scenario convention: 0 success, 1 usage/config
error, 2 numerical failure or failed criteria.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analytics
from . import groundstate as gs
from . import targets as tg
from .fields import Grid, energy
from .gauge import gauge_audit_report
from .io import SnapshotFormatError, read_llf1, write_llf1
from .lab import PRESETS, SCHEMA_VERSION, ConfigError, describe, run_scenario


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit_json(obj) -> None:
    obj = dict(obj)
    obj.setdefault("schema_version", SCHEMA_VERSION)
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    print()


def _cmd_simulate(args) -> int:
    return run_scenario(args.config, args.set or ())


def _cmd_describe(args) -> int:
    return describe(args.name)


def _cmd_groundstate(args) -> int:
    profile = gs.ground_state(tol=args.tol, r_max=args.rmax)
    c12 = gs.gn_constant(profile)
    bound = gs.critical_energy_bound(c12, tg.Sphere().curvature_bound)
    _emit_json({
        "c12": c12,
        "e_star_lower_s2": bound.e_star_lower,
        "shooting_amplitude": profile.f0,
        "mass": gs.mass(profile),
        "pohozaev_residual": gs.pohozaev_residual(profile),
    })
    return 0


def _cmd_gauge_audit(args) -> int:
    u, _ = read_llf1(args.snapshot)
    u_prev = None
    if args.prev:
        if args.dt is None or args.dt <= 0:
            raise ConfigError("--prev requires a positive --dt")
        u_prev, _ = read_llf1(args.prev)
    rep = gauge_audit_report(u, u_prev, args.dt, args.alpha, args.beta)
    _emit_json(rep)
    return 0


def _cmd_bubble_fit(args) -> int:
    u, _ = read_llf1(args.snapshot)
    if args.center == "auto":
        dens = analytics.energy_density(u).values[:, :, 0]
        ix, iy = np.unravel_index(int(np.argmax(dens)), dens.shape)
        coords = u.grid.axis_coords()
        center = (float(coords[ix]), float(coords[iy]))
    else:
        try:
            cx, cy = (float(tok) for tok in args.center.split(","))
        except ValueError:
            raise ConfigError(f"--center must be auto or x,y, got {args.center!r}")
        center = (cx, cy)
    rescaled = analytics.bubble_extract(u, center, args.scale, Grid(128, 4.0))
    fit = analytics.bubble_fit(rescaled)
    fit["window_center"] = list(center)
    fit["window_scale"] = args.scale
    fit["lam_physical"] = fit["lam"] * args.scale
    _emit_json(fit)
    return 0


def _cmd_audit(args) -> int:
    from pathlib import Path
    paths = sorted(Path(args.trajectory).glob("*.llf1"))
    if len(paths) < 2:
        raise ConfigError(f"{args.trajectory}: need at least two .llf1 snapshots")
    trajectory = []
    for p in paths:
        u, t = read_llf1(p)
        trajectory.append((t, u))
    trajectory.sort(key=lambda pair: pair[0])
    radii = tuple(float(tok) for tok in args.radii.split(","))
    u_end = trajectory[-1][1]
    target = tg.make_target("s2" if u_end.m == 3 else "torus")
    rep = {
        "snapshots": len(trajectory),
        "energy_initial": energy(trajectory[0][1]),
        "energy_final": energy(u_end),
        "ladyzhenskaya": analytics.ladyzhenskaya_audit(trajectory, radii[0]),
        "local_energy": analytics.local_energy_inequality_audit(
            trajectory, radii[0]),
        "hessian_l4": analytics.mnbv_audit(u_end, target),
        "concentration": analytics.concentration_scan(
            u_end, sorted(radii, reverse=True)),
    }
    _emit_json(rep)
    return 0


def _cmd_harmonic(args) -> int:
    grid = Grid(args.grid_n, args.half_extent)
    u, under = tg.stereographic_bubble(grid, lam=args.lam, degree=args.degree)
    write_llf1(args.out, u, 0.0)
    print(f"wrote {args.out} (n={grid.n}, L={grid.half_extent}, "
          f"E = {energy(u):.6f}, under_resolved={under})")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="llflow",
                     description="Landau-Lifshitz flow laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario config or preset")
    p.add_argument("--config", required=True,
                   help=f"config path or preset: {', '.join(sorted(PRESETS))}")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                   help="override a config entry (repeatable)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("groundstate", help="Townes profile constants")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--rmax", type=float, default=20.0)
    p.set_defaults(func=_cmd_groundstate)

    p = sub.add_parser("gauge-audit", help="gauge identities on a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--prev", help="earlier snapshot for the evolution residual")
    p.add_argument("--dt", type=float, help="time gap to --prev")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.set_defaults(func=_cmd_gauge_audit)

    p = sub.add_parser("bubble-fit", help="fit the bubble family to a window")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--center", default="auto", help="auto or x,y")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=_cmd_bubble_fit)

    p = sub.add_parser("audit", help="trajectory-level inequality audits")
    p.add_argument("--trajectory", required=True, help="directory of .llf1 files")
    p.add_argument("--radii", required=True, help="comma-separated radii")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("harmonic", help="emit a harmonic bubble snapshot")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--half-extent", type=float, default=8.0)
    p.set_defaults(func=_cmd_harmonic)

    p = sub.add_parser("describe", help="print a preset's config and criteria")
    p.add_argument("name")
    p.set_defaults(func=_cmd_describe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, SnapshotFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main(argv=sys.argv[1:]))
