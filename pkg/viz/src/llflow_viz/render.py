"""Matplotlib rendering of extracted plot data."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def render_energy(datasets, out, title=None) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for data in datasets:
        label = data["label"] or "run"
        (line,) = ax.plot(data["t"], data["energy"], label=f"E(t) [{label}]")
        ax.plot(data["t"], data["balance"], "--", color=line.get_color(),
                alpha=0.7, label=f"E(0) - dissipation [{label}]")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.set_title(title or "energy and dissipation balance")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=140)
    plt.close(fig)


def render_concentration(data, out, title=None) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for series in data["series"]:
        ax.plot(data["t"], series["values"], label=f"R = {series['radius']:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("sup local energy")
    ax.set_title(title or "local energy concentration scan")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=140)
    plt.close(fig)


def render_heatmap(data, out, title=None) -> None:
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    half = data["half_extent"]
    dens = np.asarray(data["density"])
    im = ax.imshow(dens.T, origin="lower", cmap="magma",
                   extent=(-half, half, -half, half))
    fig.colorbar(im, ax=ax, label="energy density")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or f"energy density at t = {data['t']:g}")
    fig.tight_layout()
    fig.savefig(out, dpi=140)
    plt.close(fig)


def render_bubble_profile(data, out, title=None) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogx(data["model_r"], data["model"], "-",
                label=f"fitted bubble, scale {data['lam_physical']:.3f}")
    ax.semilogx(data["radii"], data["measured"], "o", label="measured")
    ax.axhline(data["eps1"], color="gray", ls=":", label="eps1 threshold")
    ax.axhline(4 * np.pi, color="gray", ls="--", alpha=0.5, label="4 pi")
    ax.set_xlabel("ball radius")
    ax.set_ylabel("local energy")
    ax.set_title(title or "concentration profile vs bubble fit")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(out, dpi=140)
    plt.close(fig)
