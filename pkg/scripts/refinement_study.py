#!/usr/bin/env python3
"""Spatial refinement study: tension of the harmonic bubble and the
covariant curl identity, both expected to decay at O(h^2).

Usage: python3 scripts/refinement_study.py [--lam 2.0] [--grids 128,256,512]
"""
import argparse

import numpy as np

from llflow import targets as tg
from llflow.fields import Field, Grid, integrate
from llflow.gauge import (build_frame, coulomb_fix, curl_identity_residual,
                          differential_fields)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lam", type=float, default=2.0)
    ap.add_argument("--half-extent", type=float, default=8.0)
    ap.add_argument("--grids", default="128,256,512")
    args = ap.parse_args()
    grids = [int(tok) for tok in args.grids.split(",")]

    print(f"{'n':>5} {'h':>9} {'|tau|_L2':>12} {'curl res':>12}")
    prev = None
    for n in grids:
        grid = Grid(n, args.half_extent)
        bubble, _ = tg.stereographic_bubble(grid, lam=args.lam)
        tau = tg.tension(bubble, tg.Sphere())
        tau_l2 = np.sqrt(integrate(
            Field(grid, np.sum(tau.values ** 2, axis=2), 0.0)))
        smooth = tg.equivariant_data(grid, tg.gauss_profile(1.0, args.lam))
        frame = coulomb_fix(build_frame(smooth), smooth)
        curl = curl_identity_residual(
            differential_fields(frame, smooth))["residual_l2"]
        line = f"{n:5d} {grid.h:9.4f} {tau_l2:12.4e} {curl:12.4e}"
        if prev is not None:
            line += (f"   slopes {np.log2(prev[0] / tau_l2):.2f}"
                     f" / {np.log2(prev[1] / curl):.2f}")
        print(line)
        prev = (tau_l2, curl)


if __name__ == "__main__":
    main()
