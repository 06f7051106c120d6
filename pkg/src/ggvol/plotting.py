"""Figures for volume estimates (written to files, never shown)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .volumes import VolumeEstimate  # noqa: E402


def plot_estimate(est: VolumeEstimate, path: str, title: str = "") -> None:
    """Ratio against index for catalog rows and chain steps, with the closed form if any."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if est.rows:
        ax.scatter([r.index for r in est.rows], [float(r.ratio) for r in est.rows],
                   s=18, label="catalog kernels", color="tab:blue", zorder=3)
    if est.chain:
        ax.plot([r.index for r in est.chain], [float(r.ratio) for r in est.chain],
                marker="s", ms=4, color="tab:orange", label="descending chain", zorder=2)
    if est.closed_form is not None:
        ax.axhline(float(est.closed_form.value), color="tab:green", ls="--",
                   label=f"closed form {est.closed_form.value}")
    ax.set_xscale("log")
    ax.set_xlabel("index [G:H]")
    ax.set_ylabel("complexity / index")
    ax.set_title(title or f"{est.mode} complexity ratios ({est.phi})")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
