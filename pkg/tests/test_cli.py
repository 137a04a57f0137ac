import json
import math
import os

import numpy as np
import pytest

from rkstab import SQRT_PI_OVER_2
from rkstab.cli import (
    EXIT_ALL_DIVERGED,
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_USAGE,
    GridSpec,
    UsageError,
    main,
    parse_args,
)


def read_csv(path):
    meta, columns, rows = {}, None, []
    with open(path) as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                meta[key] = value
            elif columns is None:
                columns = line.split(",")
            else:
                rows.append(line.split(","))
    return meta, columns, rows


# -------------------------------------------------------------------- parsing

def test_parse_valid_trace_rk():
    spec = parse_args(
        ["trace-rk", "--activation", "erf", "--sigma-r", "0.85", "--sigma-i", "0",
         "--t-max", "200", "--out", "x.csv"]
    )
    assert spec.command == "trace-rk"
    assert spec.params.sigma_r == 0.85
    assert spec.t_max == 200
    assert spec.fmt == "csv"


def test_parse_rejects_negative_sigma():
    with pytest.raises(UsageError, match="--sigma-r"):
        parse_args(["trace-rk", "--activation", "erf", "--sigma-r", "-1", "--out", "x.csv"])


def test_parse_rejects_unknown_flag_and_missing_required():
    with pytest.raises(UsageError):
        parse_args(["trace-rk", "--activation", "erf", "--bogus", "1", "--out", "x.csv"])
    with pytest.raises(UsageError):
        parse_args(["trace-rk", "--activation", "erf"])  # no --out
    with pytest.raises(UsageError):
        parse_args(["phase-diagram", "--activation", "erf", "--grid-r", "0:2:5", "--out", "x.csv"])


def test_parse_grid_spec():
    spec = parse_args(
        ["phase-diagram", "--activation", "erf", "--grid-r", "0:2:101",
         "--grid-i", "0:2:101", "--out", "x.csv"]
    )
    assert spec.grid_r == GridSpec(0.0, 2.0, 101)
    values = spec.grid_r.values()
    assert values.size == 101 and values[0] == 0.0 and values[-1] == 2.0


@pytest.mark.parametrize("bad", ["0:2", "2:0:5", "a:b:c", "0:2:0", "1:2:1"])
def test_parse_rejects_malformed_grids(bad):
    with pytest.raises(UsageError, match="--grid-r"):
        parse_args(
            ["phase-diagram", "--activation", "erf", "--grid-r", bad,
             "--grid-i", "0:1:3", "--out", "x.csv"]
        )


def test_parse_frontier_requires_exactly_one_selector():
    with pytest.raises(UsageError, match="frontier"):
        parse_args(["frontier", "--out", "x.csv"])
    with pytest.raises(UsageError, match="frontier"):
        parse_args(["frontier", "--sigma-r", "1.0", "--sigma-i", "0.5", "--out", "x.csv"])


def test_parse_jobs_env_fallback(monkeypatch):
    monkeypatch.setenv("RKSTAB_JOBS", "3")
    spec = parse_args(["trace-rk", "--activation", "erf", "--sigma-r", "1", "--out", "x.csv"])
    assert spec.jobs == 3
    monkeypatch.setenv("RKSTAB_JOBS", "nope")
    with pytest.raises(UsageError, match="RKSTAB_JOBS"):
        parse_args(["trace-rk", "--activation", "erf", "--sigma-r", "1", "--out", "x.csv"])


def test_main_usage_error_exit_code(capsys):
    assert main(["trace-rk", "--activation", "erf", "--sigma-r", "-2", "--out", "x.csv"]) == EXIT_USAGE
    assert "--sigma-r" in capsys.readouterr().err


# ------------------------------------------------------------------- running

def test_trace_rk_stable_writes_csv(tmp_path):
    out = tmp_path / "trace.csv"
    code = main(
        ["trace-rk", "--activation", "erf", "--sigma-r", "0.85", "--sigma-i", "0",
         "--t-max", "200", "--out", str(out)]
    )
    assert code == EXIT_OK
    meta, columns, rows = read_csv(out)
    assert columns == ["t", "metric"]
    assert meta["command"] == "trace-rk"
    assert meta["activation"] == "erf"
    assert meta["version"] == "0.1.0"
    assert len(rows) == 201
    assert float(rows[-1][1]) < 1e-6


def test_trace_rc_roundtrip_floats(tmp_path):
    out = tmp_path / "rc.csv"
    code = main(
        ["trace-rc", "--activation", "erf", "--sigma-r", "0.9", "--sigma-i", "0.3",
         "--n", "200", "--d", "5", "--t-max", "30", "--seed", "7", "--out", str(out)]
    )
    assert code == EXIT_OK
    _, _, rows = read_csv(out)
    from rkstab import HyperParams, SimConfig, run_twin_experiment

    trace = run_twin_experiment(SimConfig(n=200, d=5, t_max=30, seed=7), HyperParams("erf", 0.9, 0.3))
    assert [float(r[1]) for r in rows] == list(trace.values)  # 17 digits round-trip


def test_byte_identical_reruns(tmp_path):
    args = ["phase-diagram", "--activation", "sign", "--grid-r", "0:2:4",
            "--grid-i", "0:1:3", "--t-max", "50"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(out1)]) == EXIT_OK
    assert main(args + ["--out", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()


def test_phase_diagram_sign_grid_chaotic(tmp_path):
    out = tmp_path / "phase.csv"
    code = main(
        ["phase-diagram", "--activation", "sign", "--grid-r", "0:2:5",
         "--grid-i", "0:2:5", "--out", str(out)]
    )
    assert code == EXIT_OK
    _, columns, rows = read_csv(out)
    assert columns == ["sigma_r", "sigma_i", "metric_final", "label"]
    for row in rows:
        if float(row[0]) > 0.0:
            assert row[3] == "chaotic"
    origin = [r for r in rows if float(r[0]) == 0.0 and float(r[1]) == 0.0]
    assert origin and origin[0][3] == "error"


def test_frontier_inverse_anchor_row(tmp_path):
    out = tmp_path / "frontier.csv"
    assert main(["frontier", "--sigma-i", "0", "--out", str(out)]) == EXIT_OK
    _, columns, rows = read_csv(out)
    assert columns == ["sigma_r", "sigma_i_frontier"]
    assert len(rows) == 1
    assert abs(float(rows[0][0]) - SQRT_PI_OVER_2) < 1e-6
    assert float(rows[0][1]) == 0.0


def test_frontier_grid_rows(tmp_path):
    out = tmp_path / "frontier.csv"
    assert main(["frontier", "--grid-r", "0.9:2.5:9", "--out", str(out)]) == EXIT_OK
    _, _, rows = read_csv(out)
    assert len(rows) == 9
    values = [float(r[1]) for r in rows]
    assert values == sorted(values)


def test_converge_csv_and_jobs_equivalence(tmp_path):
    base = ["converge", "--activation", "erf", "--grid-r", "0:1:3", "--grid-i", "0:1:2",
            "--n", "100", "--t-max", "10", "--seed", "3"]
    out1, out2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
    assert main(base + ["--jobs", "1", "--out", str(out1)]) == EXIT_OK
    assert main(base + ["--jobs", "4", "--out", str(out2)]) == EXIT_OK
    meta1, columns, rows1 = read_csv(out1)
    meta2, _, rows2 = read_csv(out2)
    assert columns == ["sigma_r", "sigma_i", "n", "e_value", "flag"]
    assert rows1 == rows2  # scheduling cannot change results
    assert meta1["jobs"] == "1" and meta2["jobs"] == "4"


def test_fixed_points_csv(tmp_path):
    out = tmp_path / "fp.csv"
    assert main(
        ["fixed-points", "--activation", "erf", "--sigma-r", "1.05", "--sigma-i", "0",
         "--out", str(out)]
    ) == EXIT_OK
    _, columns, rows = read_csv(out)
    assert columns == ["quantity", "value"]
    table = dict((r[0], r[1]) for r in rows)
    assert float(table["a"]) > 0.1
    assert float(table["b"]) == 0.0
    assert table["label"] == "chaotic"


def test_fixed_points_divergent_exit_code(tmp_path):
    out = tmp_path / "fp.csv"
    code = main(
        ["fixed-points", "--activation", "relu", "--sigma-r", "1.5", "--sigma-i", "1",
         "--out", str(out)]
    )
    assert code == EXIT_ALL_DIVERGED
    assert out.exists()


def test_domain_error_exit_code_and_no_file(tmp_path, capsys):
    out = tmp_path / "fp.csv"
    code = main(
        ["fixed-points", "--activation", "sign", "--sigma-r", "0", "--sigma-i", "0",
         "--out", str(out)]
    )
    assert code == EXIT_DOMAIN
    assert not out.exists()
    assert "domain error" in capsys.readouterr().err


def test_diverged_trace_exit_code(tmp_path):
    out = tmp_path / "trace.csv"
    code = main(
        ["trace-rk", "--activation", "relu", "--sigma-r", "2.5", "--sigma-i", "1",
         "--t-max", "100", "--out", str(out)]
    )
    assert code == EXIT_ALL_DIVERGED
    meta, _, rows = read_csv(out)
    assert meta["diverged"] == "true"
    assert len(rows) < 101


def test_io_error_reports_path(tmp_path, capsys):
    missing = tmp_path / "no" / "such" / "dir" / "x.csv"
    code = main(["trace-rk", "--activation", "erf", "--sigma-r", "1", "--out", str(missing)])
    assert code == 1
    assert "i/o error" in capsys.readouterr().err
    assert not missing.exists()


def test_json_format(tmp_path):
    out = tmp_path / "phase.json"
    code = main(
        ["phase-diagram", "--activation", "relu", "--grid-r", "1:2:3", "--grid-i", "0:1:2",
         "--t-max", "100", "--format", "json", "--out", str(out)]
    )
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["meta"]["command"] == "phase-diagram"
    assert payload["columns"] == ["sigma_r", "sigma_i", "metric_final", "label"]
    divergent = [row for row in payload["rows"] if row[3] == "divergent"]
    assert divergent and all(row[2] is None for row in divergent)  # strict JSON: inf -> null


def test_no_temp_files_left_behind(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["trace-rk", "--activation", "erf", "--sigma-r", "0.5", "--out", str(out)]) == EXIT_OK
    assert sorted(p.name for p in tmp_path.iterdir()) == ["t.csv"]
