"""Readers for rkstab CSV artifacts.

Artifacts start with ``# key: value`` metadata lines, then a header row and
data rows. Each figure family validates its expected column schema before
rendering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SCHEMAS",
    "CsvTable",
    "SchemaError",
    "grid_axes",
    "read_table",
    "require_schema",
]

SCHEMAS = {
    "trace": ["t", "metric"],
    "phase": ["sigma_r", "sigma_i", "metric_final", "label"],
    "converge": ["sigma_r", "sigma_i", "n", "e_value", "flag"],
    "frontier": ["sigma_r", "sigma_i_frontier"],
}


class SchemaError(ValueError):
    """Input file does not match the expected artifact schema."""


@dataclass
class CsvTable:
    path: str
    meta: dict
    columns: list
    rows: list

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def floats(self, name: str) -> np.ndarray:
        return np.array([float(v) for v in self.column(name)])

    def label(self) -> str:
        """Legend label assembled from the metadata header."""
        meta = self.meta
        parts = [meta.get("command", "?")]
        if "activation" in meta:
            parts.append(meta["activation"])
        for key, short in (("sigma_r", "sr"), ("sigma_i", "si"), ("n", "N"), ("seed", "seed")):
            if key in meta:
                parts.append(f"{short}={_compact(meta[key])}")
        return " ".join(parts)


def _compact(text: str) -> str:
    try:
        value = float(text)
    except ValueError:
        return text
    return f"{value:g}"


def read_table(path) -> CsvTable:
    meta: dict = {}
    columns = None
    rows = []
    with open(path) as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line.lstrip("# ").partition(": ")
                if sep:
                    meta[key] = value
                continue
            cells = line.split(",")
            if columns is None:
                columns = cells
            else:
                rows.append(cells)
    if columns is None:
        raise SchemaError(f"{path}: no header row found")
    return CsvTable(str(path), meta, columns, rows)


def require_schema(table: CsvTable, kind: str) -> CsvTable:
    expected = SCHEMAS[kind]
    if table.columns != expected:
        raise SchemaError(
            f"{table.path}: expected {kind} columns {expected}, found {table.columns}"
        )
    if not table.rows:
        raise SchemaError(f"{table.path}: no data rows")
    return table


def grid_axes(table: CsvTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reshape sweep rows into (sigma_r axis, sigma_i axis, value matrix).

    The value column is the third one (``metric_final`` or ``e_value``);
    non-finite entries come back as NaN for masked rendering.
    """
    sr = table.floats("sigma_r")
    si = table.floats("sigma_i")
    values = table.floats(table.columns[2] if table.columns[2] != "n" else table.columns[3])
    sr_axis = np.unique(sr)
    si_axis = np.unique(si)
    if sr_axis.size * si_axis.size != len(table.rows):
        raise SchemaError(f"{table.path}: rows do not form a full grid")
    matrix = np.full((sr_axis.size, si_axis.size), math.nan)
    for r, i_val, v in zip(sr, si, values):
        matrix[np.searchsorted(sr_axis, r), np.searchsorted(si_axis, i_val)] = v
    return sr_axis, si_axis, matrix
