"""Readers for the three llflow artifact formats.

These parse the on-disk formats directly so the plotting tool has no
dependency on the simulation package.
"""
from __future__ import annotations

import json

import numpy as np


class ArtifactError(ValueError):
    pass


def read_ledger(path) -> dict:
    """Ledger CSV: columns t, E, diss_cum, l4_cum, unit_drift, one
    sup_local_R=<r> column per scan radius, argmax_x, argmax_y."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    required = ["t", "E", "diss_cum", "l4_cum", "unit_drift"]
    if header[: len(required)] != required:
        raise ArtifactError(f"{path}: unexpected ledger columns {header[:5]}")
    radii = []
    for col in header:
        if col.startswith("sup_local_R="):
            try:
                radii.append(float(col.split("=", 1)[1]))
            except ValueError as exc:
                raise ArtifactError(f"{path}: bad radius column {col!r}") from exc
    try:
        data = np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise ArtifactError(f"{path}: non-numeric ledger entry") from exc
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ArtifactError(f"{path}: ragged ledger rows")
    cols = {name: data[:, k] for k, name in enumerate(header)}
    return {"radii": radii, "columns": cols, "header": header}


def read_snapshot(path) -> dict:
    """LLF1 snapshot: one ASCII header line then little-endian float64
    payload, row-major, component-fastest."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").strip()
        payload = fh.read()
    parts = header.split()
    if not parts or parts[0] != "LLF1":
        raise ArtifactError(f"{path}: missing LLF1 magic")
    kv = dict(tok.split("=", 1) for tok in parts[1:] if "=" in tok)
    try:
        n = int(kv["n"])
        half_extent = float(kv["L"])
        m = int(kv["m"])
        t = float(kv["t"])
    except (KeyError, ValueError) as exc:
        raise ArtifactError(f"{path}: bad LLF1 header {header!r}") from exc
    if len(payload) != n * n * m * 8:
        raise ArtifactError(f"{path}: payload is {len(payload)} bytes, "
                            f"expected {n * n * m * 8}")
    values = np.frombuffer(payload, dtype="<f8").reshape(n, n, m)
    return {"n": n, "half_extent": half_extent, "m": m, "t": t,
            "values": values}


def read_report(path) -> dict:
    """Scenario report JSON (schema_version 1)."""
    try:
        with open(path) as fh:
            report = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(report, dict) or "schema_version" not in report:
        raise ArtifactError(f"{path}: not a scenario report (no schema_version)")
    return report
