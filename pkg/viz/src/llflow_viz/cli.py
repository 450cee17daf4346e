"""llflow-viz KIND --in PATHS... --out FILE.png

Kinds: energy (one or more ledger CSVs, E(t) overlaid with the
dissipation balance), concentration (one ledger CSV), heatmap (one LLF1
snapshot), bubble-profile (one report JSON with a bubble_fit block).
Exit 0 on success, 1 on usage or artifact errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import extract, readers, render
from .readers import ArtifactError

KINDS = ("energy", "concentration", "heatmap", "bubble-profile")


def _one_input(args, kind):
    if len(args.inputs) != 1:
        raise ArtifactError(f"{kind} takes exactly one --in path")
    return args.inputs[0]


def run(args) -> int:
    if args.kind == "energy":
        datasets = [extract.energy_data(readers.read_ledger(p), Path(p).stem)
                    for p in args.inputs]
        render.render_energy(datasets, args.out, args.title)
    elif args.kind == "concentration":
        data = extract.concentration_data(
            readers.read_ledger(_one_input(args, "concentration")))
        render.render_concentration(data, args.out, args.title)
    elif args.kind == "heatmap":
        data = extract.heatmap_data(
            readers.read_snapshot(_one_input(args, "heatmap")))
        render.render_heatmap(data, args.out, args.title)
    else:
        data = extract.bubble_profile_data(
            readers.read_report(_one_input(args, "bubble-profile")))
        render.render_bubble_profile(data, args.out, args.title)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="llflow-viz", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="PATH")
    parser.add_argument("--out", required=True, metavar="FILE.png")
    parser.add_argument("--title")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return run(args)
    except (ArtifactError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
