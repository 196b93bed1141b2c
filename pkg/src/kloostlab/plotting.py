"""Figure rendering for the CLI report path.

All functions write PNG files next to the delimited output and return the
path written.  The Agg backend is forced so reports work headless.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .counting import DeviationReport
from .kloosterman import KloostermanTable
from .satotate import mu_st, AngleWindow


def save_deviation_figure(reports: list[DeviationReport], threshold: float | None,
                          label: str, path: str) -> str:
    """Per-residue deviations from the expected window count, with the
    exceptional-set threshold band when one applies."""
    a = np.array([r.a for r in reports])
    dev = np.array([r.deviation for r in reports])
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(a, dev, ".", markersize=3 if len(a) > 200 else 6, color="#1f77b4")
    ax.axhline(0.0, color="black", linewidth=0.8)
    if threshold is not None:
        ax.axhline(threshold, color="#d62728", linewidth=0.9, linestyle="--",
                   label="exceptional threshold")
        ax.axhline(-threshold, color="#d62728", linewidth=0.9, linestyle="--")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlabel("residue a")
    ax.set_ylabel("observed - expected")
    ax.set_title(label, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_angle_density_figure(table: KloostermanTable, bins: int, path: str) -> str:
    """Histogram of the angle table against the limiting density (2/pi)sin^2."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(table.angles, bins=bins, range=(0.0, math.pi), density=True,
            color="#9ecae1", edgecolor="#4292c6", linewidth=0.4, label="angles")
    grid = np.linspace(0.0, math.pi, 400)
    ax.plot(grid, (2.0 / math.pi) * np.sin(grid) ** 2, color="#d62728",
            linewidth=1.5, label="(2/pi) sin^2")
    ax.set_xlabel("angle")
    ax.set_ylabel("density")
    ax.set_title(f"Kloosterman angles, p = {table.p} ({table.method})", fontsize=10)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_angle_cdf_figure(table: KloostermanTable, disc: float, path: str) -> str:
    """Empirical angle CDF against the limit CDF, annotated with the discrepancy."""
    angles = np.sort(table.angles)
    n = len(angles)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.step(angles, np.arange(1, n + 1) / n, where="post",
            color="#1f77b4", linewidth=1.0, label="empirical")
    grid = np.linspace(0.0, math.pi, 400)
    ax.plot(grid, [mu_st(AngleWindow(0.0, b)) if b > 0 else 0.0 for b in grid],
            color="#d62728", linewidth=1.2, label="limit")
    ax.annotate(f"discrepancy = {disc:.4g}", xy=(0.04, 0.92), xycoords="axes fraction",
                fontsize=9)
    ax.set_xlabel("angle")
    ax.set_ylabel("CDF")
    ax.set_title(f"p = {table.p}: empirical vs limiting CDF", fontsize=10)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_average_figure(rows: list[dict], path: str) -> str:
    """Running averaged count vs the predicted mass as the prime cutoff grows.

    Rows carry keys p, Pi_partial, prediction (one row per prime <= T).
    """
    ps = [r["p"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ps, [r["Pi_partial"] for r in rows], color="#1f77b4", linewidth=1.2,
            label="averaged count")
    ax.plot(ps, [r["prediction"] for r in rows], color="#d62728", linewidth=1.2,
            linestyle="--", label="predicted mass")
    ax.set_xlabel("prime cutoff")
    ax.set_ylabel("count")
    ax.set_title("Averaged window count vs prediction", fontsize=10)
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
