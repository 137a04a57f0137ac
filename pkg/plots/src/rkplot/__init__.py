"""Figure rendering for rkstab CSV artifacts.

Three figure families: log-scale stability traces, phase-diagram heatmaps
with an optional frontier overlay, and convergence heatmaps. Inputs are the
CSV files written by the ``rkstab`` command line; this package never calls
into the simulation code itself.
"""

from .io import SCHEMAS, CsvTable, SchemaError, grid_axes, read_table, require_schema
from .render import render_heatmap, render_trace

__version__ = "0.1.0"
