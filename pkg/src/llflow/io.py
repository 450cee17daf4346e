"""LLF1 snapshot format: one ASCII header line, then raw float64 payload.

Header: ``LLF1 n=<int> L=<decimal> m=<int> t=<decimal>\\n`` followed by
n^2 * m little-endian 64-bit floats, row-major, component-fastest.
"""
from __future__ import annotations

import numpy as np

from .fields import Field, Grid


class SnapshotFormatError(ValueError):
    pass


def write_llf1(path, field: Field, t: float = 0.0) -> None:
    header = f"LLF1 n={field.grid.n} L={field.grid.half_extent!r} m={field.m} t={t!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(field.values.astype("<f8").tobytes())


def read_llf1(path) -> tuple[Field, float]:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").strip()
        payload = fh.read()
    parts = header.split()
    if not parts or parts[0] != "LLF1":
        raise SnapshotFormatError(f"{path}: missing LLF1 magic")
    kv = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise SnapshotFormatError(f"{path}: malformed header token {tok!r}")
        key, val = tok.split("=", 1)
        kv[key] = val
    try:
        n = int(kv["n"])
        half_extent = float(kv["L"])
        m = int(kv["m"])
        t = float(kv["t"])
    except (KeyError, ValueError) as exc:
        raise SnapshotFormatError(f"{path}: bad header {header!r}") from exc
    expected = n * n * m * 8
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f8").reshape(n, n, m).astype(float)
    return Field(Grid(n, half_extent), values), t
