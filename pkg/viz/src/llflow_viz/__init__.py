"""Plotting for llflow artifacts, consuming only the on-disk formats:
ledger CSV, LLF1 snapshots, and scenario report JSON."""

from .extract import (bubble_profile_data, concentration_data, energy_data,
                      heatmap_data)
from .readers import ArtifactError, read_ledger, read_report, read_snapshot

__all__ = [
    "ArtifactError", "read_ledger", "read_report", "read_snapshot",
    "energy_data", "concentration_data", "heatmap_data",
    "bubble_profile_data",
]
