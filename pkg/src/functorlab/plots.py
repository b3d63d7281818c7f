"""Matplotlib figures for CLI reports, rendered off-screen with the Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def bars(path: Path, labels, series: dict, title: str, ylabel: str = "dimension") -> str:
    """Grouped bar chart; ``series`` maps a legend entry to values aligned with ``labels``."""
    labels = [str(x) for x in labels]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(labels) + 2), 3.2))
    width = 0.8 / max(1, len(series))
    x = np.arange(len(labels))
    for k, (name, vals) in enumerate(series.items()):
        ax.bar(x + k * width - 0.4 + width / 2, vals, width, label=name)
    ax.set_xticks(x, labels, rotation=45 if len(labels) > 8 else 0)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    return _save(fig, path)


def heatmap(path: Path, table: np.ndarray, rows, cols, title: str, xlabel: str, ylabel: str) -> str:
    fig, ax = plt.subplots(figsize=(max(4.0, 0.4 * len(cols) + 2), max(3.0, 0.35 * len(rows) + 1.5)))
    im = ax.imshow(table, cmap="viridis", origin="lower", aspect="auto")
    ax.set_xticks(range(len(cols)), [str(c) for c in cols])
    ax.set_yticks(range(len(rows)), [str(r) for r in rows])
    for (r, c), v in np.ndenumerate(table):
        if v:
            ax.text(c, r, str(int(v)), ha="center", va="center", color="w", fontsize=7)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    return _save(fig, path)


def outcome_bars(path: Path, names, seconds, passed, title: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 3.2))
    colors = ["tab:green" if ok else "tab:red" for ok in passed]
    ax.bar([str(n) for n in names], seconds, color=colors)
    ax.set_ylabel("seconds")
    ax.set_title(title)
    return _save(fig, path)


__all__ = ["bars", "heatmap", "outcome_bars"]
