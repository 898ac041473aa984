"""Matplotlib rendering of tension-space heatmaps with optional movement
and trace overlays, for the CLI report path."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import Movement, TensionSpace

__all__ = ["render_heatmap"]


def render_heatmap(
    space: TensionSpace,
    path: str | Path,
    movements: list[Movement] | None = None,
    start: tuple[int, int] | None = None,
    title: str | None = None,
    log_scale: bool = False,
) -> None:
    """Write a heatmap PNG: brightness proportional to state count, x
    rightward and y upward, arrows for any movements, a dot for the start."""
    counts = space.counts.astype(np.float64)
    img = np.log1p(counts) if log_scale else counts

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(img.T, origin="lower", cmap="magma", interpolation="nearest")
    ax.set_xlabel("x worldview distance")
    ax.set_ylabel("y worldview distance")
    ax.set_xticks(range(space.x_max + 1))
    ax.set_yticks(range(space.y_max + 1))
    if space.axes is not None:
        (xc, xt), (yc, yt) = space.axes
        ax.set_xlabel(f"{xc}:{xt} distance")
        ax.set_ylabel(f"{yc}:{yt} distance")
    if title:
        ax.set_title(title)

    for movement in movements or []:
        dx = movement.end.x - movement.start.x
        dy = movement.end.y - movement.start.y
        ax.annotate(
            "",
            xy=(movement.end.x, movement.end.y),
            xytext=(movement.start.x, movement.start.y),
            arrowprops=dict(arrowstyle="->", color="cyan", lw=2),
        )
        ax.text(
            movement.start.x + dx / 2,
            movement.start.y + dy / 2,
            str(movement.movement_class),
            color="cyan",
            fontsize=9,
        )
    if start is not None:
        ax.plot([start[0]], [start[1]], "o", color="magenta", markersize=10)

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
