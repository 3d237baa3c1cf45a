"""Static matplotlib figures written to files (Agg backend, no display)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

from .circuit import all_states, index_to_state  # noqa: E402
from .residual import BOUNDARY, PARTITION_COLORS  # noqa: E402


def _rgb(c):
    return tuple(v / 255 for v in c)


def plot_partition(labels: np.ndarray, radius: float, path, title: str = "", points=None) -> None:
    """Label raster with a legend; ``points`` (k × 2) are overlaid as markers."""
    keys = [BOUNDARY, 0, 1, 2, 3]
    cmap = ListedColormap([_rgb(PARTITION_COLORS[k]) for k in keys])
    codes = np.searchsorted(keys, labels)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(codes, cmap=cmap, vmin=0, vmax=len(keys) - 1, extent=(-radius, radius, -radius, radius),
              interpolation="nearest")
    if points is not None:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ax.scatter(pts[:, 0], pts[:, 1], c="white", edgecolors="black", zorder=3)
    handles = [Patch(color=_rgb(PARTITION_COLORS[k]), label="(%+d,%+d)" % index_to_state(k, 2)) for k in range(4)]
    ax.legend(handles=handles, loc="upper right", fontsize=8)
    ax.set_xlabel("$a_1$")
    ax.set_ylabel("$a_2$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def affine_images(linear, offset, n: int) -> np.ndarray:
    X = all_states(n).astype(float)
    return X @ np.asarray(linear, dtype=float).T + np.asarray(offset, dtype=float)


def plot_classification(report, path) -> None:
    types = sorted(report.counts)
    total = [report.counts[t] for t in types]
    feas = [report.feasible[t] for t in types]
    x = np.arange(len(types))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(x - 0.2, total, width=0.4, label="circuits")
    ax.bar(x + 0.2, feas, width=0.4, label="feasible")
    ax.set_xticks(x, [f"type {t}" for t in types])
    ax.set_title("shape (%d,%d)" % report.shape)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_trajectory(traj, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.step(range(len(traj.energies)), traj.energies, where="post")
    ax.set_xlabel("step")
    ax.set_ylabel("energy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
