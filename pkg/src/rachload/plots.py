"""Static figure rendering for experiment results and likelihood surfaces.

File output only (Agg backend): MAE-vs-load curves from a harness MAE
summary, and a heatmap of a likelihood surface. Everything else in the
package stays free of plotting concerns.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .estimators import LikelihoodSurface
from .model import LoadHypothesis

_DPI = 150


def save_mae_curves(mae_rows, path, metric: str = "mae_total") -> str:
    """MAE against the true low-class count, one panel per estimator.

    ``mae_rows`` is the output of ``compute_mae`` with the default grouping;
    each (T, n_high) pair becomes one series.
    """
    rows = list(mae_rows)
    if not rows:
        raise ValueError("no MAE rows to plot")
    estimators = sorted({row["estimator"] for row in rows})
    fig, axes = plt.subplots(
        1, len(estimators), figsize=(5.5 * len(estimators), 4.2), squeeze=False
    )
    for ax, name in zip(axes[0], estimators):
        series: dict[tuple[int, int], list[tuple[int, float]]] = {}
        for row in rows:
            if row["estimator"] != name:
                continue
            key = (row["t"], row["n_high_true"])
            series.setdefault(key, []).append((row["n_low_true"], row[metric]))
        for (t, n_high), points in sorted(series.items()):
            points.sort()
            ax.plot(
                [x for x, _ in points],
                [y for _, y in points],
                marker="o",
                label=f"T={t}, high={n_high}",
            )
        ax.set_title(f"{name} estimator")
        ax.set_xlabel("true low-class count")
        ax.set_ylabel(metric)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def save_likelihood_heatmap(
    surface: LikelihoodSurface, path, truth: LoadHypothesis | None = None
) -> str:
    """Log-likelihood heatmap over the grid, argmax starred."""
    values = np.ma.masked_invalid(surface.values)
    fig, ax = plt.subplots(figsize=(6.0, 4.8))
    image = ax.imshow(values, origin="lower", aspect="auto", cmap="viridis")
    fig.colorbar(image, ax=ax, label="log-likelihood")
    best = surface.best_hypothesis()
    ax.plot(best.n_low, best.n_high, marker="*", markersize=14, color="red",
            linestyle="none", label="estimate")
    if truth is not None:
        ax.plot(truth.n_low, truth.n_high, marker="o", markersize=10,
                markerfacecolor="none", color="white", linestyle="none",
                label="truth")
    ax.set_xlabel("hypothesised low-class count")
    ax.set_ylabel("hypothesised high-class count")
    ax.set_title(f"{surface.mode} likelihood surface")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)
