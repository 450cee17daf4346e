"""Pure plot-data extraction: every plot kind has a function that turns
parsed artifacts into the exact arrays that will be drawn.  Keeping this
separate from rendering makes the numbers testable against golden files.
"""
from __future__ import annotations

import numpy as np

from .readers import ArtifactError


def energy_data(ledger: dict, label: str = "") -> dict:
    """E(t) together with the dissipation-ledger prediction
    E(0) - diss_cum(t); the two overlay when the energy balance closes."""
    cols = ledger["columns"]
    e0 = float(cols["E"][0])
    return {
        "label": label,
        "t": cols["t"].tolist(),
        "energy": cols["E"].tolist(),
        "balance": (e0 - cols["diss_cum"]).tolist(),
        "e0": e0,
    }


def concentration_data(ledger: dict) -> dict:
    """Sup-local-energy traces, one per scan radius."""
    if not ledger["radii"]:
        raise ArtifactError("ledger has no sup_local_R columns")
    cols = ledger["columns"]
    series = []
    for r in ledger["radii"]:
        series.append({"radius": r,
                       "values": cols[f"sup_local_R={r:g}"].tolist()})
    return {"t": cols["t"].tolist(), "series": series}


def heatmap_data(snapshot: dict) -> dict:
    """Pointwise energy density (1/2)|grad u|^2 of a snapshot, central
    differences inside and one-sided at the domain edge."""
    vals = snapshot["values"]
    n = snapshot["n"]
    h = 2.0 * snapshot["half_extent"] / n
    dens = np.zeros((n, n))
    for axis in (0, 1):
        d = np.empty_like(vals)
        v = np.moveaxis(vals, axis, 0)
        dv = np.moveaxis(d, axis, 0)
        dv[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        dv[0] = (v[1] - v[0]) / h
        dv[-1] = (v[-1] - v[-2]) / h
        dens += 0.5 * np.sum(d ** 2, axis=2)
    coords = -snapshot["half_extent"] + (np.arange(n) + 0.5) * h
    return {"t": snapshot["t"], "half_extent": snapshot["half_extent"],
            "coords": coords.tolist(), "density": dens.tolist()}


def bubble_profile_data(report: dict) -> dict:
    """Measured ball energies against the fitted-bubble prediction
    E_ball(r) = 4*pi*r^2 / (r^2 + lam^2)."""
    results = report.get("results", {})
    fit_block = results.get("bubble_fit")
    if fit_block is None:
        raise ArtifactError("report carries no bubble_fit block")
    scan_rows = fit_block["scan"]["scan"]
    radii = [row["radius"] for row in scan_rows]
    measured = [row["sup_local_energy"] for row in scan_rows]
    lam = fit_block["fit"]["lam"] * fit_block["scale"]
    r_model = np.geomspace(min(radii) / 2, max(radii), 200)
    model = 4.0 * np.pi * r_model ** 2 / (r_model ** 2 + lam ** 2)
    return {
        "radii": radii,
        "measured": measured,
        "lam_physical": lam,
        "center": fit_block["center"],
        "model_r": r_model.tolist(),
        "model": model.tolist(),
        "eps1": fit_block["scan"]["eps1"],
    }
