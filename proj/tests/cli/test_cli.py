import csv
import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("EPITEST_CLI", "epitest")
DATA = Path(os.environ.get("EPITEST_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
WORLD = DATA / "scenarios" / "synthetic_world.cfg"


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


@pytest.fixture(scope="module")
def world(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    r = run("simulate", "--config", WORLD, "--out", out)
    assert r.returncode == 0, r.stderr
    return out / "data.csv"


@pytest.fixture(scope="module")
def report(world, tmp_path_factory):
    out = tmp_path_factory.mktemp("validate")
    r = run("validate", "--input", world, "--out", out, "--model", "all")
    assert r.returncode == 0, r.stderr
    return out, json.loads((out / "report.json").read_text())


def test_simulate_is_deterministic(world, tmp_path):
    r = run("simulate", "--config", WORLD, "--out", tmp_path)
    assert r.returncode == 0
    assert (tmp_path / "data.csv").read_bytes() == world.read_bytes()
    meta = json.loads((tmp_path / "data.meta.json").read_text())
    assert meta["parameters"]["seed"] == "7"
    assert meta["parameters"]["model"] == "up_saturating"


def test_simulate_seed_override_changes_data(world, tmp_path):
    r = run("simulate", "--config", WORLD, "--out", tmp_path, "--seed", "8")
    assert r.returncode == 0
    assert (tmp_path / "data.csv").read_bytes() != world.read_bytes()


def test_validate_ranks_up_saturating_first(report):
    out, doc = report
    models = doc["models"]
    assert set(models) == {"adapted", "limiting", "up", "down"}
    errors = {k: v["averaged_error"] for k, v in models.items()}
    assert errors["up"] == min(errors.values())
    assert errors["up"] < errors["limiting"] < errors["adapted"]
    alpha = models["up"]["alpha_median"]
    lo, hi = models["up"]["alpha_ci"]
    assert lo <= alpha <= hi
    assert abs(alpha / 0.002 - 1) < 0.1
    assert len(doc["regions"]) == 20
    assert len(list((out / "deaths").glob("*.csv"))) == 20
    assert len(doc["comparisons"]) == 6


def test_parameter_free_model_reports_no_alpha(world, tmp_path):
    r = run("validate", "--input", world, "--out", tmp_path, "--model", "limiting")
    assert r.returncode == 0, r.stderr
    m = json.loads((tmp_path / "report.json").read_text())["models"]["limiting"]
    assert "alpha_median" not in m and "alpha_ci" not in m


def test_single_fold_is_a_usage_error(world, tmp_path):
    r = run("validate", "--input", world, "--out", tmp_path, "--model", "up", "--folds", "1")
    assert r.returncode == 2


def test_missing_input_file_is_a_usage_error(tmp_path):
    r = run("validate", "--input", tmp_path / "absent.csv", "--out", tmp_path)
    assert r.returncode == 2


def test_input_without_qualifying_regions_is_a_data_error(tmp_path):
    src = tmp_path / "in.csv"
    src.write_text(
        "date,location,population,total_cases,total_tests,total_deaths\n"
        "2020-04-01,X,1000,10,100,1\n2020-04-02,X,1000,20,200,2\n"
    )
    assert run("validate", "--input", src, "--out", tmp_path / "o").returncode == 3


def test_unknown_flag_is_a_usage_error():
    assert run("validate", "--no-such-flag").returncode == 2


def test_adjust_example(tmp_path):
    src = tmp_path / "in.csv"
    src.write_text(
        "date,location,population,new_cases,new_tests,new_deaths\n"
        "2020-04-01,Testland,1000000,100,1710,1\n"
        "2020-04-02,Testland,1000000,100,1710,1\n"
    )
    r = run("adjust", "--input", src, "--out", tmp_path / "out")
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader((tmp_path / "out" / "adjusted" / "Testland.csv").open()))
    assert [float(row["prevalence_estimate"]) for row in rows] == [200.0, 200.0]


def test_adjust_without_tests_is_a_data_error(tmp_path):
    src = tmp_path / "in.csv"
    src.write_text("date,location,population,new_cases,new_deaths\n2020-04-01,X,1000,10,1\n")
    assert run("adjust", "--input", src, "--out", tmp_path / "out").returncode == 3


def test_lockdown_overrides_are_recorded(world, tmp_path):
    r = run("lockdown", "--input", world, "--out", tmp_path,
            "--date", "Region 01=2020-04-05", "--date", "Region 02=2020-04-10")
    assert r.returncode == 0, r.stderr
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["lockdown_dates"]["Region 01"] == {"date": "2020-04-05", "source": "override"}
    rows = list(csv.DictReader((tmp_path / "causal_effects.csv").open()))
    assert {row["model"] for row in rows} == {"adapted", "up"}
    for row in rows:
        theta = float(row["lambda_pre"]) - float(row["lambda_during"])
        assert abs(theta - float(row["theta"])) < 1e-12


def test_bad_lockdown_date_is_a_usage_error(world, tmp_path):
    r = run("lockdown", "--input", world, "--out", tmp_path, "--date", "Region 01=April")
    assert r.returncode == 2


def test_bad_scenario_is_a_usage_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("regions = 3\nmodel = limiting\nalpha = 0.002\n")
    assert run("simulate", "--config", cfg, "--out", tmp_path / "o").returncode == 2
    cfg.write_text("regions = 3\nsurprise = 1\n")
    assert run("simulate", "--config", cfg, "--out", tmp_path / "o").returncode == 2


def test_adjust_zero_tests_and_linearity_flag(tmp_path):
    src = tmp_path / "in.csv"
    src.write_text(
        "date,location,population,new_cases,new_tests,new_deaths\n"
        "2020-04-01,T,1000000,100,0,1\n"
        "2020-04-02,T,1000000,100,5000,1\n"
    )
    assert run("adjust", "--input", src, "--out", tmp_path / "out").returncode == 0
    rows = list(csv.DictReader((tmp_path / "out" / "adjusted" / "T.csv").open()))
    assert rows[0]["prevalence_estimate"] == "" and rows[0]["in_linearity_range"] == "false"
    assert float(rows[1]["prevalence_estimate"]) == pytest.approx(100 * (5000 + 1710) / 5000)
    assert rows[1]["in_linearity_range"] == "false"


@pytest.fixture(scope="module")
def bias_world(tmp_path_factory):
    out = tmp_path_factory.mktemp("bias")
    r = run("simulate", "--config", DATA / "scenarios" / "lockdown_bias.cfg", "--out", out)
    assert r.returncode == 0, r.stderr
    return out / "data.csv"


def test_lockdown_growth_bias(bias_world, tmp_path):
    dates = []
    for i in range(1, 14):
        dates += ["--date", f"Region {i:02d}=2020-03-07"]
    assert run("lockdown", "--input", bias_world, "--out", tmp_path, *dates).returncode == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["regions"] == 13
    models = summary["models"]
    assert models["adapted"]["lambda_pre"]["median"] > models["up"]["lambda_pre"]["median"]
    assert summary["paired_adapted_vs_up"]["lambda_pre"]["p_value"] < 0.05


def test_lockdown_single_region_has_no_p_values(bias_world, tmp_path):
    r = run("lockdown", "--input", bias_world, "--out", tmp_path, "--date", "Region 01=2020-03-07")
    assert r.returncode == 0, r.stderr
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["paired_adapted_vs_up"]["theta"] is None
    assert summary["models"]["up"]["theta"]["wilcoxon_vs_zero"] is None


def test_lockdown_without_windows_is_a_data_error(bias_world, tmp_path):
    r = run("lockdown", "--input", bias_world, "--out", tmp_path, "--date", "Region 01=2020-02-02")
    assert r.returncode == 3


def test_scenario_too_short_for_lockdown(tmp_path):
    cfg = tmp_path / "short.cfg"
    cfg.write_text("regions = 2\ndays = 100\nlockdown_day = 90\n")
    assert run("simulate", "--config", cfg, "--out", tmp_path / "o").returncode == 2


def test_simulated_data_round_trips_through_validate_input(world, tmp_path):
    # the generated file is readable with the default schema and selection
    r = run("validate", "--input", world, "--out", tmp_path, "--model", "adapted", "--folds", "2")
    assert r.returncode == 0, r.stderr
