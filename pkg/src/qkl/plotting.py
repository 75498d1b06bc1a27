"""Render cost curves to image files next to their CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .estimation import CostCurve


def save_cost_plot(curve: CostCurve, path) -> str:
    """Plot classical (and coherent, if present) costs against the homodyne angle."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(curve.thetas_deg, curve.classical_costs, label="purely classical", lw=1.6)
    if curve.coherent_costs is not None:
        ax.plot(
            curve.thetas_deg,
            curve.coherent_costs,
            label="coherent-classical",
            lw=1.6,
            ls="--",
        )
    ax.set_xlabel("homodyne angle (deg)")
    ax.set_ylabel("mean-square estimation error")
    if curve.config_label:
        ax.set_title(curve.config_label, fontsize=10)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
