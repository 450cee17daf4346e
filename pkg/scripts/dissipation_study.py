#!/usr/bin/env python3
"""Dissipation-ledger residual versus time step on the below-threshold
decay data: the ledger pairs the edge-based energy with the
constant-closure flow, so the residual should be pure time-integration
error (second order for the explicit trapezoidal scheme).

Usage: python3 scripts/dissipation_study.py [--t-end 1.0] [--dts 1e-3,5e-4,2.5e-4]
"""
import argparse

import numpy as np

from llflow import analytics
from llflow import targets as tg
from llflow.dynamics import SimConfig, run
from llflow.fields import Grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--dts", default="1e-3,5e-4,2.5e-4")
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=1.0)
    args = ap.parse_args()

    grid = Grid(128, 8.0)
    u0 = tg.energy_calibrate(
        lambda a: tg.equivariant_data(grid, tg.gauss_profile(a, 2.0)),
        0.9 * 4 * np.pi, bracket=(1e-3, np.pi))
    prev = None
    print(f"{'dt':>10} {'residual':>12} {'ratio':>7}")
    for tok in args.dts.split(","):
        dt = float(tok)
        cfg = SimConfig(alpha=args.alpha, beta=args.beta, scheme="heun",
                        dt=dt, t_end=args.t_end, ledger_every=20,
                        closure="constant")
        state = run(u0, tg.Sphere(), cfg)
        res = analytics.dissipation_residual(state.ledger)
        ratio = f"{prev / res:7.2f}" if prev else "      -"
        print(f"{dt:10.2e} {res:12.4e} {ratio}")
        prev = res


if __name__ == "__main__":
    main()
