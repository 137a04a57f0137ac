"""Command-line front end emitting deterministic CSV/JSON artifacts.

Commands: trace-rc, trace-rk, phase-diagram, frontier, converge,
fixed-points. Exit codes: 0 success, 2 usage error, 3 domain error,
4 divergence-only results. Output files carry a metadata header and are
written atomically (temp file + rename), with floats at 17 significant
digits so reruns of one spec are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__
from .base import Activation, DomainError, HyperParams, NoConvergenceError, SimConfig
from .convergence import convergence_sweep, FLAG_OK
from .kernels import rk_trace
from .reservoir import run_twin_experiment
from .stability import (
    Regime,
    erf_fixed_point_a,
    erf_fixed_point_b,
    erf_frontier_sigma_i,
    erf_frontier_sigma_r,
    phase_diagram,
    rk_limit,
    sign_limit_asymptotic,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_ALL_DIVERGED = 4

COMMANDS = ("trace-rc", "trace-rk", "phase-diagram", "frontier", "converge", "fixed-points")

_JOBS_ENV = "RKSTAB_JOBS"


class UsageError(ValueError):
    """Invalid command line; maps to exit status 2."""


@dataclass(frozen=True)
class GridSpec:
    """Inclusive grid axis MIN:MAX:STEPS; STEPS counts points including both ends."""

    lo: float
    hi: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)

    def __str__(self) -> str:
        return f"{_fmt(self.lo)}:{_fmt(self.hi)}:{self.steps}"


@dataclass
class ExperimentSpec:
    """Validated run description for one CLI invocation."""

    command: str
    out_path: str
    fmt: str = "csv"
    activation: Activation | None = None
    sigma_r: float | None = None
    sigma_i: float | None = None
    n: int = 2000
    d: int = 10
    t_max: int = 200
    seed: int = 0
    tol: float = 1e-6
    grid_r: GridSpec | None = None
    grid_i: GridSpec | None = None
    jobs: int = 1

    @property
    def params(self) -> HyperParams:
        if self.activation is None:
            raise ValueError("spec has no activation")
        return HyperParams(self.activation, self.sigma_r or 0.0, self.sigma_i or 0.0)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep control of the exit status
        raise UsageError(message)


def _parse_grid(text: str, flag: str) -> GridSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{flag} expects MIN:MAX:STEPS, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"{flag} expects numeric MIN:MAX and integer STEPS, got {text!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError(f"{flag} bounds must be finite")
    if steps < 1:
        raise UsageError(f"{flag} needs at least 1 step")
    if steps == 1 and lo != hi:
        raise UsageError(f"{flag} with STEPS=1 requires MIN == MAX")
    if steps > 1 and not lo < hi:
        raise UsageError(f"{flag} requires MIN < MAX")
    return GridSpec(lo, hi, steps)


def _build_parser() -> _Parser:
    parser = _Parser(prog="rkstab", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name: str, help_text: str, *, activation: bool, sim: bool, grids: bool):
        p = sub.add_parser(name, help=help_text)
        if activation:
            p.add_argument("--activation", choices=[a.value for a in Activation], required=True)
        if name == "frontier":
            p.add_argument("--sigma-r", type=float, default=None)
            p.add_argument("--sigma-i", type=float, default=None)
            p.add_argument("--grid-r", type=str, default=None, metavar="MIN:MAX:STEPS")
        else:
            p.add_argument("--sigma-r", type=float, default=0.0)
            p.add_argument("--sigma-i", type=float, default=0.0)
            if grids:
                p.add_argument("--grid-r", type=str, required=True, metavar="MIN:MAX:STEPS")
                p.add_argument("--grid-i", type=str, required=True, metavar="MIN:MAX:STEPS")
        if sim:
            p.add_argument("--n", type=int, default=2000)
            p.add_argument("--d", type=int, default=10)
        p.add_argument("--t-max", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--out", required=True)
        p.add_argument("--format", choices=["csv", "json"], default="csv", dest="fmt")
        return p

    add("trace-rc", "twin-reservoir stability trace at finite size", activation=True, sim=True, grids=False)
    add("trace-rk", "kernel-limit stability trace", activation=True, sim=False, grids=False)
    add("phase-diagram", "limit metric over a (sigma_r, sigma_i) grid", activation=True, sim=False, grids=True)
    add("frontier", "erf stability frontier (forward, inverse, or along a grid)", activation=False, sim=False, grids=False)
    add("converge", "finite-size vs limit Gram gap over a grid", activation=True, sim=True, grids=True)
    add("fixed-points", "fixed points and regime for one parameter point", activation=True, sim=False, grids=False)
    return parser


_DEFAULT_T_MAX = {"converge": 50}


def parse_args(argv) -> ExperimentSpec:
    """Validate a raw argument vector into an :class:`ExperimentSpec`.

    Raises :class:`UsageError` naming the offending flag on any problem.
    """
    ns = _build_parser().parse_args(list(argv))
    command = ns.command

    for flag, value in (("--sigma-r", ns.sigma_r), ("--sigma-i", ns.sigma_i)):
        if value is not None and not (math.isfinite(value) and value >= 0.0):
            raise UsageError(f"{flag} must be a finite nonnegative real, got {value}")
    if ns.tol is None or not (math.isfinite(ns.tol) and ns.tol > 0.0):
        raise UsageError(f"--tol must be a positive real, got {ns.tol}")
    if ns.seed < 0 or ns.seed >= 2**64:
        raise UsageError(f"--seed must be a 64-bit unsigned integer, got {ns.seed}")

    t_max = ns.t_max if ns.t_max is not None else _DEFAULT_T_MAX.get(command, 200)
    if t_max < 1:
        raise UsageError(f"--t-max must be >= 1, got {t_max}")

    jobs = ns.jobs
    if jobs is None:
        env = os.environ.get(_JOBS_ENV, "").strip()
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise UsageError(f"{_JOBS_ENV} must be an integer, got {env!r}")
        else:
            jobs = 1
    if jobs < 1:
        raise UsageError(f"--jobs must be >= 1, got {jobs}")

    spec = ExperimentSpec(
        command=command,
        out_path=ns.out,
        fmt=ns.fmt,
        activation=Activation(ns.activation) if getattr(ns, "activation", None) else None,
        sigma_r=ns.sigma_r,
        sigma_i=ns.sigma_i,
        n=getattr(ns, "n", 2000),
        d=getattr(ns, "d", 10),
        t_max=t_max,
        seed=ns.seed,
        tol=ns.tol,
        jobs=jobs,
    )

    if command in ("trace-rc", "converge"):
        if spec.n < 1:
            raise UsageError(f"--n must be >= 1, got {spec.n}")
        if spec.d < 1:
            raise UsageError(f"--d must be >= 1, got {spec.d}")

    if command in ("phase-diagram", "converge"):
        spec.grid_r = _parse_grid(ns.grid_r, "--grid-r")
        spec.grid_i = _parse_grid(ns.grid_i, "--grid-i")
    elif command == "frontier":
        given = [
            flag
            for flag, value in (
                ("--sigma-r", ns.sigma_r),
                ("--sigma-i", ns.sigma_i),
                ("--grid-r", ns.grid_r),
            )
            if value is not None
        ]
        if len(given) != 1:
            raise UsageError(
                "frontier requires exactly one of --sigma-r, --sigma-i, --grid-r"
                f" (got {', '.join(given) or 'none'})"
            )
        if ns.grid_r is not None:
            spec.grid_r = _parse_grid(ns.grid_r, "--grid-r")
    return spec


def _fmt(x) -> str:
    """17 significant digits: round-trip exact for 64-bit floats."""
    return format(float(x), ".17g")


def _meta_items(meta: dict) -> list[tuple[str, str]]:
    items = []
    for key, value in meta.items():
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = _fmt(value)
        else:
            text = str(value)
        items.append((key, text))
    return items


def _render_csv(meta: dict, columns, rows) -> str:
    lines = [f"# {key}: {value}" for key, value in _meta_items(meta)]
    lines.append(",".join(columns))
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            elif isinstance(cell, (float, np.floating)):
                cells.append(_fmt(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _render_json(meta: dict, columns, rows) -> str:
    def cell_value(cell):
        if isinstance(cell, (np.integer,)):
            return int(cell)
        if isinstance(cell, (float, np.floating)):
            value = float(cell)
            return value if math.isfinite(value) else None  # strict JSON
        return cell

    json_meta = {
        key: value if isinstance(value, (bool, int, float, str)) or value is None else str(value)
        for key, value in meta.items()
    }
    payload = {
        "meta": json_meta,
        "columns": list(columns),
        "rows": [[cell_value(c) for c in row] for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def _write_artifact(path: str, fmt: str, meta: dict, columns, rows) -> None:
    text = _render_csv(meta, columns, rows) if fmt == "csv" else _render_json(meta, columns, rows)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".rkstab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _base_meta(spec: ExperimentSpec) -> dict:
    meta: dict = {"command": spec.command}
    if spec.activation is not None:
        meta["activation"] = spec.activation.value
    return meta


def _execute(spec: ExperimentSpec):
    """Compute (meta, columns, rows, all_diverged) for a validated spec."""
    meta = _base_meta(spec)
    if spec.command == "trace-rc":
        meta.update(
            sigma_r=spec.sigma_r, sigma_i=spec.sigma_i, n=spec.n, d=spec.d,
            t_max=spec.t_max, seed=spec.seed,
        )
        config = SimConfig(n=spec.n, d=spec.d, t_max=spec.t_max, seed=spec.seed)
        trace = run_twin_experiment(config, spec.params)
        meta["diverged"] = trace.diverged
        rows = [(t, float(v)) for t, v in enumerate(trace.values)]
        return meta, ("t", "metric"), rows, trace.diverged

    if spec.command == "trace-rk":
        meta.update(sigma_r=spec.sigma_r, sigma_i=spec.sigma_i, t_max=spec.t_max)
        trace = rk_trace(spec.params, spec.t_max)
        meta["diverged"] = trace.diverged
        rows = [(t, float(v)) for t, v in enumerate(trace.values)]
        return meta, ("t", "metric"), rows, trace.diverged

    if spec.command == "phase-diagram":
        meta.update(grid_r=spec.grid_r, grid_i=spec.grid_i, t_max=spec.t_max, tol=spec.tol)
        diagram = phase_diagram(
            spec.activation, spec.grid_r.values(), spec.grid_i.values(),
            t_max=spec.t_max, tol=spec.tol,
        )
        rows = []
        labeled = []
        for cell in diagram.cells:
            label = "error" if cell.error is not None else cell.label.value
            if cell.error is None:
                labeled.append(cell.label)
            rows.append((cell.sigma_r, cell.sigma_i, cell.limit_value, label))
        all_diverged = bool(labeled) and all(lab is Regime.DIVERGENT for lab in labeled)
        return meta, ("sigma_r", "sigma_i", "metric_final", "label"), rows, all_diverged

    if spec.command == "frontier":
        meta["tol"] = spec.tol
        if spec.grid_r is not None:
            meta["grid_r"] = spec.grid_r
            rows = [(float(sr), erf_frontier_sigma_i(float(sr))) for sr in spec.grid_r.values()]
        elif spec.sigma_r is not None:
            meta["sigma_r"] = spec.sigma_r
            rows = [(spec.sigma_r, erf_frontier_sigma_i(spec.sigma_r))]
        else:
            meta["sigma_i"] = spec.sigma_i
            rows = [(erf_frontier_sigma_r(spec.sigma_i, tol=min(spec.tol, 1e-9)), spec.sigma_i)]
        return meta, ("sigma_r", "sigma_i_frontier"), rows, False

    if spec.command == "converge":
        meta.update(
            grid_r=spec.grid_r, grid_i=spec.grid_i, n=spec.n, d=spec.d,
            t_len=spec.t_max, seed=spec.seed, jobs=spec.jobs,
        )
        cells = convergence_sweep(
            spec.activation, spec.grid_r.values(), spec.grid_i.values(),
            n=spec.n, t_len=spec.t_max, seed=spec.seed, d=spec.d, jobs=spec.jobs,
        )
        rows = [(c.sigma_r, c.sigma_i, c.n, c.e_value, c.flag) for c in cells]
        all_diverged = all(c.flag != FLAG_OK for c in cells)
        return meta, ("sigma_r", "sigma_i", "n", "e_value", "flag"), rows, all_diverged

    # fixed-points
    meta.update(sigma_r=spec.sigma_r, sigma_i=spec.sigma_i, tol=spec.tol)
    params = spec.params
    regime = rk_limit(params, tol=spec.tol)
    rows: list[tuple] = []
    if params.activation is Activation.ERF:
        a = erf_fixed_point_a(params)
        b = erf_fixed_point_b(params, a.value)
        rows += [
            ("a", a.value), ("a_iterations", a.iterations), ("a_residual", a.residual),
            ("b", b.value), ("b_iterations", b.iterations), ("b_residual", b.residual),
        ]
    elif params.activation is Activation.SIGN:
        if params.sigma_i > 0.0:
            rows.append(("asymptotic_limit", sign_limit_asymptotic(params.sigma_r, params.sigma_i)))
    rows += [("limit_value", regime.limit_value), ("label", regime.label.value)]
    return meta, ("quantity", "value"), rows, regime.label is Regime.DIVERGENT


def run(spec: ExperimentSpec) -> int:
    """Execute a spec and write its artifact; returns the exit status."""
    meta, columns, rows, all_diverged = _execute(spec)
    meta["version"] = __version__
    _write_artifact(spec.out_path, spec.fmt, meta, columns, rows)
    return EXIT_ALL_DIVERGED if all_diverged else EXIT_OK


def main(argv=None) -> int:
    try:
        spec = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"rkstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(spec)
    except DomainError as exc:
        print(f"rkstab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NoConvergenceError as exc:
        print(f"rkstab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        target = getattr(exc, "filename", None) or spec.out_path
        print(f"rkstab: i/o error writing {target}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
