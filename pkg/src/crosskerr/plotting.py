"""Figure rendering for the report path.

All plots go straight to files through the Agg backend; nothing here
opens a window.  The helpers take plain arrays so the CLI can feed
them the same data it writes to CSV.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "set_plot_style",
    "save_line_plot",
    "save_map_plot",
    "save_class_map",
    "save_wigner_plot",
]

CLASS_COLORS = {
    "OnePB": "#1f77b4",
    "TwoPB": "#2ca02c",
    "TwoPIT": "#ff7f0e",
    "ThreePIT": "#d62728",
    "Poissonian": "#cccccc",
    "invalid": "#ffffff",
}


def set_plot_style() -> None:
    plt.rcParams.update(
        {
            "figure.dpi": 150,
            "savefig.dpi": 300,
            "savefig.bbox": "tight",
            "axes.grid": True,
            "grid.alpha": 0.3,
            "font.size": 9,
        }
    )


def save_line_plot(
    path,
    x: np.ndarray,
    curves: dict[str, np.ndarray],
    xlabel: str,
    ylabel: str,
    logy: bool = False,
    hline: float | None = None,
) -> None:
    set_plot_style()
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    for label, y in curves.items():
        y = np.asarray(y, dtype=float)
        if logy:
            y = np.where(y > 0, y, np.nan)
        ax.plot(x, y, label=label, lw=1.2)
    if hline is not None:
        ax.axhline(hline, color="k", lw=0.8, ls="--")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(curves) > 1:
        ax.legend(fontsize=8)
    fig.savefig(path)
    plt.close(fig)


def save_map_plot(
    path,
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    xlabel: str,
    ylabel: str,
    zlabel: str,
    log: bool = False,
) -> None:
    """Pseudocolor map of z[j, i] over (x[i], y[j])."""
    set_plot_style()
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    data = np.asarray(z, dtype=float)
    if log:
        data = np.log10(np.where(data > 0, data, np.nan))
        zlabel = f"log10 {zlabel}"
    mesh = ax.pcolormesh(x, y, data, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=zlabel)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.savefig(path)
    plt.close(fig)


def save_class_map(
    path,
    x: np.ndarray,
    y: np.ndarray,
    labels: np.ndarray,
    xlabel: str,
    ylabel: str,
) -> None:
    """Discrete-color map of classification labels[j, i]."""
    set_plot_style()
    names = list(CLASS_COLORS)
    index = {name: i for i, name in enumerate(names)}
    grid = np.vectorize(lambda s: index.get(s, index["invalid"]))(labels)
    cmap = matplotlib.colors.ListedColormap([CLASS_COLORS[n] for n in names])
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    mesh = ax.pcolormesh(
        x, y, grid, shading="nearest", cmap=cmap, vmin=-0.5, vmax=len(names) - 0.5
    )
    cbar = fig.colorbar(mesh, ax=ax, ticks=range(len(names)))
    cbar.ax.set_yticklabels(names, fontsize=7)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.savefig(path)
    plt.close(fig)


def save_wigner_plot(path, xs: np.ndarray, ps: np.ndarray, w: np.ndarray, title: str = "") -> None:
    """Symmetric red-blue map of a Wigner function W[i, j] over
    (xs[i], ps[j])."""
    set_plot_style()
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    lim = float(np.abs(w).max()) or 1.0
    mesh = ax.pcolormesh(
        xs, ps, w.T, shading="nearest", cmap="RdBu_r", vmin=-lim, vmax=lim
    )
    fig.colorbar(mesh, ax=ax, label="W(x, p)")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title, fontsize=9)
    fig.savefig(path)
    plt.close(fig)
