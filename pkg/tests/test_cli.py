import json
import os

import numpy as np
import pandas as pd
import pytest

import cli.commands
import symbol_calculus.suites as symbol_suites
from cli.config import RunConfig, merge_run, operator_to_json, parse_config
from cli.reports import UNVERSIONED, build_id, read_matrix, write_matrix, write_table
from cli.suites import tolerance_names, tolerance_overrides, verify_all
from linalg_core.errors import SchemaError
from main_calderon import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from normal_family.geometries import cusp_domain, strip_laplacian
from utils.records import SuiteRow

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
CONFIGS = os.path.join(ROOT, "input_operators")


def _config(name):
    with open(os.path.join(CONFIGS, name), "r", encoding="utf-8") as f:
        return json.load(f)


def _same_coefficients(a, b):
    assert set(a.coefficients) == set(b.coefficients)
    for key, poly in a.coefficients.items():
        assert set(poly) == set(b.coefficients[key])
        for term, c in poly.items():
            np.testing.assert_allclose(c, b.coefficients[key][term])


# ----------------------------
# parse_config
# ----------------------------

def test_strip_config_parses_to_catalogue_operator():
    run, op = parse_config(json.dumps(_config("strip_laplacian.json")))
    assert op.geometry_tag == "StripHyperbolic"
    assert op.fibre.dim == 1 and op.fibre.length == 1.0
    _same_coefficients(op, strip_laplacian())
    assert run.ns == [64, 128, 256]
    assert run.S == 12.0


def test_operator_json_round_trip():
    op = cusp_domain()
    _, parsed = parse_config(operator_to_json(op))
    _same_coefficients(parsed, op)
    assert parsed.weight_c == 2


def test_weight_is_accepted_and_recorded():
    _, op = parse_config(json.dumps(_config("cusp_domain.json")))
    assert op.weight_c == 2
    assert op.geometry_tag == "CuspDomain"


def test_shipped_configs_parse():
    for name in sorted(os.listdir(CONFIGS)):
        run, op = parse_config(json.dumps(_config(name)))
        assert op.order == 2
        assert isinstance(run, RunConfig)


def test_missing_leading_coefficient():
    doc = _config("strip_laplacian.json")
    doc["coefficients"] = [c for c in doc["coefficients"] if c["k"] != 2]
    with pytest.raises(SchemaError) as info:
        parse_config(json.dumps(doc))
    assert info.value.path == "coefficients"


def test_schema_violations_carry_dotted_paths():
    doc = _config("strip_laplacian.json")
    doc["geometry"] = "Moebius"
    doc["coefficients"][1]["poly"][0][0] = -1
    with pytest.raises(SchemaError) as info:
        parse_config(json.dumps(doc))
    paths = [p for p, _ in info.value.violations]
    assert "geometry" in paths
    assert "coefficients.1.poly" in paths


def test_interval_fibre_needs_length():
    doc = _config("strip_laplacian.json")
    doc["fibre"] = {"type": "interval", "length": 0.0}
    with pytest.raises(SchemaError) as info:
        parse_config(json.dumps(doc))
    assert info.value.path.startswith("fibre")


def test_invalid_json():
    with pytest.raises(SchemaError):
        parse_config("{ not json")


def test_matrix_coefficients_for_systems():
    doc = _config("strip_laplacian.json")
    doc["system_size"] = 2
    doc["coefficients"][1]["poly"] = [[0, 0, [[1.0, 0.0], [0.0, 2.0]], [[0.0, 0.5], [-0.5, 0.0]]]]
    _, op = parse_config(json.dumps(doc))
    a = op.coefficients[(0, (), (2,))][(0, 0)]
    np.testing.assert_allclose(a, [[1.0, 0.5j], [-0.5j, 2.0]])
    np.testing.assert_allclose(op.coefficients[(2, (), (0,))][(0, 0)], np.eye(2))


def test_matrix_coefficient_shape_checked():
    doc = _config("strip_laplacian.json")
    doc["coefficients"][1]["poly"] = [[0, 0, [[1.0, 0.0], [0.0, 1.0]], 0.0]]
    with pytest.raises(SchemaError) as info:
        parse_config(json.dumps(doc))
    assert info.value.path == "coefficients.1.poly.0"


def test_merge_run_overrides_and_validates():
    base = RunConfig(ns=[64], tau_steps=5)
    merged = merge_run(base, {"ns": [32, 64], "tau_steps": None, "seed": 7})
    assert merged.ns == [32, 64]
    assert merged.tau_steps == 5
    assert merged.seed == 7
    with pytest.raises(SchemaError) as info:
        merge_run(base, {"tau_min": 2.0, "tau_max": 1.0})
    assert info.value.path.startswith("run")
    with pytest.raises(SchemaError):
        merge_run(base, {"tolerances": {"PATH_GAP": -1.0}})


def test_tau_grid():
    assert RunConfig(tau_min=-1.0, tau_max=1.0, tau_steps=3).tau_grid() == [-1.0, 0.0, 1.0]


# ----------------------------
# reports
# ----------------------------

def test_table_has_build_id_and_fixed_float_format(tmp_path):
    path = tmp_path / "t.csv"
    write_table([{"a": 1.0 / 3.0, "b": 2}], str(path))
    df = pd.read_csv(path, dtype={"build_id": str})
    assert list(df.columns) == ["a", "b", "build_id"]
    assert df["build_id"][0] == build_id()
    assert "3.333333333333e-01" in path.read_text()


def test_build_id_outside_git(monkeypatch):
    import cli.reports as reports

    def no_repo(*args, **kwargs):
        raise reports.GitError("no repository")

    monkeypatch.setattr(reports, "Repo", no_repo)
    reports.build_id.cache_clear()
    try:
        assert reports.build_id() == UNVERSIONED
    finally:
        reports.build_id.cache_clear()


def test_matrix_text_format(tmp_path):
    m = np.array([[1.0 + 2.0j, -0.5], [0.25j, 3.0]])
    path = tmp_path / "m.txt"
    write_matrix(m, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "# 2 2"
    assert len(lines) == 5
    assert [float(v) for v in lines[1].split()] == [1.0, 2.0]
    np.testing.assert_array_equal(read_matrix(str(path)), m)


# ----------------------------
# verify_all
# ----------------------------

def test_tolerance_names_cover_every_suite():
    names = tolerance_names()
    assert set(names) == {"symbol", "normal", "lab", "discrete"}
    assert "PATH_GAP" in names["discrete"]
    assert "CLOSED_FORM_TOL" in names["symbol"]


def test_tolerance_override_is_restored():
    import discrete_calderon.suites as discrete_suites

    before = discrete_suites.PATH_GAP
    with tolerance_overrides({"path_gap": 2e-5}):
        assert discrete_suites.PATH_GAP == 2e-5
    assert discrete_suites.PATH_GAP == before
    with pytest.raises(SchemaError):
        with tolerance_overrides({"NO_SUCH_TOL": 1.0}):
            pass


def _fake_symbol(seed):
    return [SuiteRow("dn_symbol", 0, True, 1e-12), SuiteRow("dn_symbol", 1, seed != 99, 2e-12)]


def test_verify_runs_only_selected_suites(tmp_path, monkeypatch):
    monkeypatch.setattr(symbol_suites, "run_symbol", _fake_symbol)
    status, results = verify_all(RunConfig(out=str(tmp_path), suites=["symbol"]))
    assert status == 0
    assert list(results) == ["symbol"]
    assert sorted(os.listdir(tmp_path)) == ["verify_summary.csv", "verify_symbol.csv"]
    summary = pd.read_csv(tmp_path / "verify_summary.csv")
    assert summary["checks"][0] == 2 and summary["failed"][0] == 0


def test_verify_fails_on_a_failed_check(tmp_path, monkeypatch):
    monkeypatch.setattr(symbol_suites, "run_symbol", _fake_symbol)
    status, _ = verify_all(RunConfig(out=str(tmp_path), suites=["symbol"], seed=99))
    assert status == 1


def test_verify_output_is_byte_identical(tmp_path, monkeypatch):
    monkeypatch.setattr(symbol_suites, "run_symbol", _fake_symbol)
    verify_all(RunConfig(out=str(tmp_path / "a"), suites=["symbol"]))
    verify_all(RunConfig(out=str(tmp_path / "b"), suites=["symbol"]))
    for name in ("verify_symbol.csv", "verify_summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


# ----------------------------
# main
# ----------------------------

def test_symbol_subcommand(tmp_path):
    out = tmp_path / "symbol"
    config = os.path.join(CONFIGS, "strip_laplacian.json")
    assert main(["symbol", "--config", config, "--out", str(out), "--xi", "2.0"]) == EXIT_OK
    df = pd.read_csv(out / "symbol.csv")
    assert len(df) == 1
    assert df["dn_re"][0] == pytest.approx(2.0, abs=1e-9)
    assert df["c_0_0_re"][0] == pytest.approx(0.5, abs=1e-10)


def test_symbol_subcommand_is_deterministic(tmp_path):
    config = os.path.join(CONFIGS, "exterior_shifted.json")
    for name in ("a", "b"):
        assert main(["symbol", "--config", config, "--out", str(tmp_path / name)]) == EXIT_OK
    assert (tmp_path / "a" / "symbol.csv").read_bytes() == (tmp_path / "b" / "symbol.csv").read_bytes()


def test_normal_subcommand_lists_failures(tmp_path):
    args = ["normal", "--geometry", "StripHyperbolic", "--out", str(tmp_path),
            "--tau-min", "-1", "--tau-max", "1", "--tau-steps", "3", "--bump-height", "0"]
    assert main(args) == EXIT_OK
    table = pd.read_csv(tmp_path / "normal.csv")
    assert sorted(table["tau"]) == [-1.0, 1.0]
    assert (table["gap"] > 0).all()
    failures = pd.read_csv(tmp_path / "normal_failures.csv")
    assert list(failures["tau"]) == [0.0]


def test_discrete_subcommand_on_point_fibre(tmp_path):
    config = os.path.join(CONFIGS, "half_line_toy.json")
    assert main(["discrete", "--config", config, "--out", str(tmp_path), "--ns", "64", "128"]) == EXIT_OK
    table = pd.read_csv(tmp_path / "discrete_paths.csv")
    assert list(table["n_s"]) == [64, 128]
    assert table["gap"].iloc[1] < table["gap"].iloc[0]
    assert read_matrix(str(tmp_path / "discrete_projector.txt")).shape == (2, 2)


def test_lab_subcommand_exit_status(tmp_path, monkeypatch):
    monkeypatch.setattr(cli.commands, "run_lab", lambda seed: [SuiteRow("augment", 0, False, 1.0)])
    assert main(["lab", "--out", str(tmp_path)]) == EXIT_FAILED
    assert pd.read_csv(tmp_path / "lab.csv")["passed"].tolist() == [False]


def test_input_errors_exit_with_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"order": 2}')
    assert main(["verify", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_INPUT
    assert main(["normal", "--out", str(tmp_path)]) == EXIT_INPUT
    point = os.path.join(CONFIGS, "half_line_toy.json")
    assert main(["normal", "--config", point, "--out", str(tmp_path)]) == EXIT_INPUT
    assert main(["symbol", "--config", point, "--out", str(tmp_path)]) == EXIT_INPUT
    assert main(["verify", "--out", str(tmp_path), "--tol-override", "PATH_GAP"]) == EXIT_INPUT


def test_unknown_suite_rejected_by_parser():
    with pytest.raises(SystemExit):
        main(["verify", "--suite", "everything"])
