"""Static SVG diagnostics: divisor scatter and log-density heatmap on a fixed grid."""

from __future__ import annotations

import numpy as np

from .qd_core import RationalQD


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "qdlab"
    import matplotlib.pyplot as plt

    return plt


def _frame(q: RationalQD) -> tuple[float, float, float]:
    pts = np.concatenate([q.pole_points, q.zero_points]) if q.zeros else q.pole_points
    if len(pts) == 0:
        return 0.0, 0.0, 1.0
    cx, cy = float(np.mean(pts.real)), float(np.mean(pts.imag))
    half = float(np.max(np.abs(pts - complex(cx, cy)))) * 1.25 or 1.0
    return cx, cy, half


def write_svg(q: RationalQD, path: str, grid: int = 200, heatmap: bool = True) -> None:
    plt = _pyplot()
    cx, cy, half = _frame(q)
    fig, ax = plt.subplots(figsize=(5, 5))
    if heatmap:
        xs = np.linspace(cx - half, cx + half, grid)
        ys = np.linspace(cy - half, cy + half, grid)
        X, Y = np.meshgrid(xs, ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            L = np.log10(np.abs(q(X + 1j * Y)))
        L[~np.isfinite(L)] = np.nan
        ax.imshow(L, origin="lower", extent=(xs[0], xs[-1], ys[0], ys[-1]), cmap="viridis")
    P = q.pole_points
    ax.scatter(P.real, P.imag, marker="x", color="red", label="poles")
    if q.zeros:
        Z = q.zero_points
        ax.scatter(Z.real, Z.imag, marker="o", facecolors="none", edgecolors="white", label="zeros")
    ax.set_xlim(cx - half, cx + half)
    ax.set_ylim(cy - half, cy + half)
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=7)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
