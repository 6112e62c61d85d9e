"""Matplotlib rendering of figure/sweep tables to image files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figures import FigureData

_STYLES = ("-", "--", "-.", ":")
_MARKERS = ("o", "s", "^", "d", "v", "*")


def _numeric(rows, key):
    out = []
    for row in rows:
        value = row.get(key, "")
        out.append(float(value) if value != "" else np.nan)
    return np.asarray(out)


def render_figure(data: FigureData, path: str) -> None:
    """Render a figure table to `path` (grid presets become a heatmap)."""
    if data.kind == "grid":
        _render_grid(data, path)
        return
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    series_values = []
    if data.series_key:
        seen = dict.fromkeys(row[data.series_key] for row in data.rows)
        series_values = list(seen)
    else:
        series_values = [None]
    plot_keys = [k for k in data.value_keys if not k.endswith(("half_width", "_ci"))]
    for s_idx, s_val in enumerate(series_values):
        rows = [
            r for r in data.rows
            if data.series_key is None or r[data.series_key] == s_val
        ]
        x = _numeric(rows, data.xkey)
        for v_idx, key in enumerate(plot_keys):
            y = _numeric(rows, key)
            if np.all(np.isnan(y)):
                continue
            label = key if s_val is None else f"{key} ({data.series_key}={s_val})"
            ax.plot(
                x, y, linestyle=_STYLES[v_idx % len(_STYLES)],
                marker=_MARKERS[s_idx % len(_MARKERS)], markersize=3.5,
                label=label,
            )
    if data.xlog:
        ax.set_xscale("log")
    ax.set_xlabel(data.xkey)
    ax.set_ylabel(data.ylabel or "value")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_grid(data: FigureData, path: str) -> None:
    xs = sorted({row[data.xkey] for row in data.rows})
    ys = sorted({row[data.extra_keys[0]] for row in data.rows})
    grid = np.full((len(ys), len(xs)), np.nan)
    value_key = data.value_keys[-1]
    for row in data.rows:
        i = ys.index(row[data.extra_keys[0]])
        j = xs.index(row[data.xkey])
        grid[i, j] = row[value_key]
    fig, ax = plt.subplots(figsize=(6.0, 4.6))
    mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=data.ylabel or value_key)
    ax.set_xlabel(data.xkey)
    ax.set_ylabel(data.extra_keys[0])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep(rows: list[dict], xkey: str, xlog: bool, path: str) -> None:
    """Render a generic sweep table: every numeric column against the axis."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    x = _numeric(rows, xkey)
    for idx, key in enumerate(rows[0].keys()):
        if key == xkey:
            continue
        y = _numeric(rows, key)
        if np.all(np.isnan(y)) or not np.issubdtype(y.dtype, np.floating):
            continue
        ax.plot(x, y, linestyle=_STYLES[idx % len(_STYLES)], label=key)
    if xlog:
        ax.set_xscale("log")
    ax.set_xlabel(xkey)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
