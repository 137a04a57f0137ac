"""Renderers for the three figure families.

Read-only over their inputs; axes ranges always come from the data. PNG by
default, vector formats by output extension (SVG metadata is stripped of
dates so identical inputs give identical bytes).
"""

from __future__ import annotations

import math
import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import CsvTable, SchemaError, grid_axes, read_table, require_schema

__all__ = ["render_heatmap", "render_trace"]

_VALUE_COLUMN = {"phase": "metric_final", "converge": "e_value"}


def _save(fig, out_path) -> None:
    kwargs = {}
    if str(out_path).lower().endswith(".svg"):
        kwargs["metadata"] = {"Date": None}  # keep output bytes reproducible
    fig.savefig(out_path, dpi=150, bbox_inches="tight", **kwargs)
    plt.close(fig)


def render_trace(input_paths, out_path) -> None:
    """Overlay stability traces on one logarithmic axis, one curve per file."""
    if not input_paths:
        raise SchemaError("no trace inputs given")
    tables = [require_schema(read_table(p), "trace") for p in input_paths]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for table in tables:
        t = table.floats("t")
        metric = table.floats("metric")
        positive = np.where(metric > 0.0, metric, math.nan)  # log scale drops zeros
        ax.plot(t, positive, label=table.label())
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("stability metric")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    _save(fig, out_path)


def _edges(centers: np.ndarray) -> np.ndarray:
    if centers.size == 1:
        half = 0.5 if centers[0] == 0.0 else abs(centers[0]) * 0.05 + 0.05
        return np.array([centers[0] - half, centers[0] + half])
    mids = 0.5 * (centers[1:] + centers[:-1])
    first = centers[0] - (mids[0] - centers[0])
    last = centers[-1] + (centers[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def _load_frontier(path) -> tuple[np.ndarray, np.ndarray]:
    table = require_schema(read_table(path), "frontier")
    return table.floats("sigma_r"), table.floats("sigma_i_frontier")


def render_heatmap(input_path, out_path, frontier_path=None) -> None:
    """Heatmap of a sweep metric over (sigma_r, sigma_i), linear color scale.

    Accepts phase-diagram or convergence artifacts; non-finite cells
    (divergent or failed) are drawn in a distinct hatch color. An optional
    frontier polyline is overlaid and clipped to the grid, with a warning
    when parts of it fall outside.
    """
    table = read_table(input_path)
    kind = None
    for name, value_column in _VALUE_COLUMN.items():
        if value_column in table.columns:
            kind = name
    if kind is None:
        raise SchemaError(
            f"{table.path}: expected a phase or convergence artifact, found columns {table.columns}"
        )
    require_schema(table, kind)
    sr_axis, si_axis, matrix = grid_axes(table)

    masked = np.ma.masked_invalid(matrix)
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("lightgray")
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    mesh = ax.pcolormesh(_edges(sr_axis), _edges(si_axis), masked.T, cmap=cmap, shading="flat")
    fig.colorbar(mesh, ax=ax, label=_VALUE_COLUMN[kind])

    if frontier_path is not None:
        fr_r, fr_i = _load_frontier(frontier_path)
        inside = (
            (fr_r >= sr_axis.min()) & (fr_r <= sr_axis.max())
            & (fr_i >= si_axis.min()) & (fr_i <= si_axis.max())
        )
        if not inside.all():
            warnings.warn(
                f"{frontier_path}: {int((~inside).sum())} frontier points fall outside "
                "the heatmap grid; overlay clipped",
                stacklevel=2,
            )
        ax.plot(fr_r, fr_i, color="tab:blue", linewidth=2.0, label="stability frontier")
        ax.legend(loc="upper left", fontsize=8)
        ax.set_xlim(_edges(sr_axis)[[0, -1]])
        ax.set_ylim(_edges(si_axis)[[0, -1]])

    ax.set_xlabel("sigma_r")
    ax.set_ylabel("sigma_i")
    title = table.meta.get("activation", "")
    command = table.meta.get("command", kind)
    ax.set_title(f"{command} {title}".strip())
    _save(fig, out_path)
