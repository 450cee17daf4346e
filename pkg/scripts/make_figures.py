#!/usr/bin/env python3
"""Run the decay and bubble presets, then render the four standard
figures with the separate llflow-viz tool.

Usage: python3 scripts/make_figures.py [--out figures]
"""
import argparse
import subprocess
import sys
from pathlib import Path

from llflow.lab import run_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    figdir = Path(args.out)
    figdir.mkdir(parents=True, exist_ok=True)

    decay = figdir / "runs" / "decay"
    bubble = figdir / "runs" / "bubble"
    for preset, outdir in (("decay-below-threshold", decay),
                           ("bubble-synthetic", bubble)):
        code = run_scenario(preset, [f"output.dir={outdir}"])
        if code:
            print(f"{preset} exited {code}", file=sys.stderr)
            return code

    jobs = [
        ("energy", decay / "decay_ledger.csv", "energy.png"),
        ("concentration", decay / "decay_ledger.csv", "concentration.png"),
        ("heatmap", decay / "decay_final.llf1", "heatmap.png"),
        ("bubble-profile", bubble / "bubble_report.json", "bubble_profile.png"),
    ]
    for kind, src, name in jobs:
        cmd = ["llflow-viz", kind, "--in", str(src),
               "--out", str(figdir / name)]
        proc = subprocess.run(cmd)
        if proc.returncode:
            return proc.returncode
        print(f"wrote {figdir / name}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
