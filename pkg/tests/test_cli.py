import csv
import json
import math
import os
import subprocess
import sys

import pytest

from jlparadox.cli import SEED_ENV, main

SMALL_CONFIG = """
[histogram]
low = 0.0
high = 60.0
n_bins = 60

[background]
shape = "flat"
per_bin = 50.0

[signal]
resolution = 0.5

[scan]
start = 10.0
stop = 50.0
n = 5

[data]
source = "toy"
theta = 30.0
psi = 30.0

[toys]
n = 200

[upcrossing]
n_calibration = 200
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(SMALL_CONFIG)
    return path


def strip_volatile(doc):
    doc = json.loads(json.dumps(doc))
    doc["manifest"].pop("timestamp")
    doc["manifest"].pop("command_line")
    return doc


class TestPvalue:
    def test_z5(self, capsys):
        doc = run_json(capsys, "pvalue", "--z", "5", "--tails", "1")
        assert doc["p"] == pytest.approx(2.8665e-7, rel=1e-4)
        assert doc["lambda"] == pytest.approx(3.7267e-6, rel=1e-4)
        assert doc["d"] == 13.0
        assert set(doc) == {"z", "p", "log10_p", "tails", "lambda", "neg2_log_lambda", "d"}

    def test_p_half(self, capsys):
        assert run_json(capsys, "pvalue", "--p", "0.5", "--tails", "1")["z"] == 0.0

    def test_two_tailed(self, capsys):
        assert run_json(capsys, "pvalue", "--p", "0.05", "--tails", "2")["z"] == pytest.approx(1.959963984540054)

    def test_conflicting_flags(self, capsys):
        assert run(capsys, "pvalue", "--z", "5", "--p", "0.1")[0] == 2

    def test_bad_domain(self, capsys):
        assert run(capsys, "pvalue", "--p", "1.5")[0] == 2

    def test_human_output(self, capsys):
        code, out, _ = run(capsys, "pvalue", "--z", "5")
        assert code == 0 and "p: 2.86652e-07" in out

    def test_full_precision_json(self, capsys):
        doc = run_json(capsys, "pvalue", "--z", "3")
        assert doc["p"] == 0.0013498980316300933


class TestBf:
    def test_headline(self, capsys):
        doc = run_json(capsys, "bf", "--z", "5", "--r", "1e6", "--pi0", "0.5")
        assert doc["asymptotic"]["posterior_h0"] == pytest.approx(0.788, abs=1e-3)
        assert doc["disagreement"] is True
        assert "convention" in doc["threshold_note"]
        for key in ("exact", "asymptotic", "hierarchy_ok", "p"):
            assert key in doc
        assert "ockham" in doc["exact"]

    def test_root_two(self, capsys):
        doc = run_json(capsys, "bf", "--z", "0", "--r", "1")
        assert doc["exact"]["bf"] == pytest.approx(math.sqrt(2), rel=1e-12)

    def test_break_even(self, capsys):
        doc = run_json(capsys, "bf", "--z", "3", "--r", "90.017")
        assert doc["asymptotic"]["bf"] == pytest.approx(1.0, abs=1e-3)

    def test_bad_family(self, capsys):
        assert run(capsys, "bf", "--z", "3", "--r", "10", "--prior", "laplace")[0] == 2

    def test_bad_pi0(self, capsys):
        assert run(capsys, "bf", "--z", "3", "--r", "10", "--pi0", "1.5")[0] == 2

    def test_alpha_flag(self, capsys):
        doc = run_json(capsys, "bf", "--z", "3.5", "--r", "1e5", "--alpha-z", "3")
        assert doc["alpha_z"] == 3.0 and doc["disagreement"] is True


class TestScanParadox:
    def test_csv(self, capsys, tmp_path):
        out = tmp_path / "grid.csv"
        code, _, err = run(capsys, "scan-paradox", "--z-min", "0", "--z-max", "5", "--nz", "6",
                           "--r-min", "1", "--r-max", "1e6", "--nr", "4", "--out", str(out))
        assert code == 0, err
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 24
        by_z = {float(r["z"]): r["r_crossover"] for r in rows}
        assert by_z[0.0] == "none"
        assert float(by_z[5.0]) == pytest.approx(2.6834e5, rel=1e-3)
        assert list(rows[0]) == ["z", "r", "log10_bf_exact", "bf_exact", "log10_bf_asymptotic",
                                 "posterior_h0", "p", "disagreement", "r_crossover"]

    def test_one_by_one_matches_bf(self, capsys):
        grid = run_json(capsys, "scan-paradox", "--z-min", "2.5", "--nz", "1", "--r-min", "300", "--nr", "1")
        bf = run_json(capsys, "bf", "--z", "2.5", "--r", "300")
        (row,) = grid["rows"]
        assert row["bf_exact"] == bf["exact"]["bf"]
        assert row["posterior_h0"] == bf["exact"]["posterior_h0"]
        assert row["disagreement"] == bf["disagreement"]

    def test_unwritable(self, capsys, tmp_path):
        bad = tmp_path / "missing" / "grid.csv"
        assert run(capsys, "scan-paradox", "--nz", "1", "--nr", "1", "--out", str(bad))[0] == 3


class TestBump:
    def test_runs_and_schema(self, capsys, config, tmp_path):
        out, table = tmp_path / "res.json", tmp_path / "res.csv"
        code, _, err = run(capsys, "bump", str(config), "--seed", "3", "--out", str(out), "--csv", str(table))
        assert code == 0, err
        doc = json.loads(out.read_text())
        assert set(doc) == {"manifest", "model", "scan", "global_mc", "global_upcrossing", "thresholds"}
        assert set(doc["manifest"]) == {"command_line", "config_hash", "config_text", "master_seed",
                                        "n_toys", "workers", "tool_version", "timestamp"}
        assert doc["manifest"]["master_seed"] == 3
        assert doc["scan"]["psi_hat"] == 30.0
        assert doc["global_mc"]["method"] == "monte_carlo"
        assert doc["global_upcrossing"]["method"] == "upcrossing"
        rows = list(csv.reader(table.open()))
        assert rows[0] == ["psi", "local_p", "local_z", "theta_hat"] and len(rows) == 6

    def test_deterministic(self, capsys, config):
        a = run_json(capsys, "bump", str(config), "--seed", "9")
        b = run_json(capsys, "bump", str(config), "--seed", "9", "--workers", "2")
        a.pop("manifest"), b.pop("manifest")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_byte_identical_modulo_timestamp(self, capsys, config, tmp_path):
        texts = []
        for name in ("a.json", "b.json"):
            run(capsys, "bump", str(config), "--seed", "4", "--out", str(tmp_path / name))
            doc = json.loads((tmp_path / name).read_text())
            doc["manifest"]["timestamp"] = ""
            texts.append(json.dumps(doc, sort_keys=True))
        assert texts[0] == texts[1]

    def test_manifest_round_trip(self, capsys, config, tmp_path):
        first = tmp_path / "first.json"
        run(capsys, "bump", str(config), "--seed", "11", "--toys", "150", "--out", str(first))
        again = run_json(capsys, "bump", "--from-manifest", str(first))
        assert strip_volatile(again) == strip_volatile(json.loads(first.read_text()))

    def test_env_seed(self, capsys, config, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "21")
        from_env = run_json(capsys, "bump", str(config))
        assert from_env["manifest"]["master_seed"] == 21
        flagged = run_json(capsys, "bump", str(config), "--seed", "22")
        assert flagged["manifest"]["master_seed"] == 22
        monkeypatch.delenv(SEED_ENV)
        assert run_json(capsys, "bump", str(config))["manifest"]["master_seed"] == 0

    def test_config_seed_beats_env(self, capsys, tmp_path, monkeypatch):
        path = tmp_path / "seeded.toml"
        path.write_text(SMALL_CONFIG.replace("n = 200", "n = 200\nseed = 77"))
        monkeypatch.setenv(SEED_ENV, "21")
        assert run_json(capsys, "bump", str(path))["manifest"]["master_seed"] == 77

    def test_single_point_trials_factor(self, capsys, tmp_path):
        path = tmp_path / "one.toml"
        # a modest excess keeps the observed p away from the q0 = 0 atom at p = 1/2
        path.write_text(SMALL_CONFIG.replace("start = 10.0", "start = 30.0").replace("n = 5", "n = 1")
                        .replace("theta = 30.0", "theta = 15.0").replace("n = 200", "n = 2000"))
        doc = run_json(capsys, "bump", str(path), "--seed", "1")
        g = doc["global_mc"]
        assert g["local_p"] < 0.2
        assert abs(g["trials_factor"] - 1.0) < 3 * g["mc_uncertainty"] / g["local_p"]

    def test_observed_counts(self, capsys, tmp_path):
        counts = [50] * 60
        counts[30] = 90
        path = tmp_path / "counts.toml"
        path.write_text(SMALL_CONFIG.replace('source = "toy"\ntheta = 30.0\npsi = 30.0',
                                             f'source = "counts"\ncounts = {counts}'))
        doc = run_json(capsys, "bump", str(path))
        assert doc["model"]["data_source"] == "counts" and doc["scan"]["psi_hat"] == 30.0

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "bump", str(tmp_path / "nope.toml"))[0] == 3

    @pytest.mark.parametrize("edit", [
        ("resolution = 0.5", "resolution = -1.0"),
        ("[scan]\nstart = 10.0\nstop = 50.0\nn = 5", "[scan]"),
        ("n = 200", "n = 10"),
        ("per_bin = 50.0", "per_bin = 50.0 oops"),
    ])
    def test_config_errors(self, capsys, tmp_path, edit):
        path = tmp_path / "bad.toml"
        text = SMALL_CONFIG.replace(*edit)
        assert text != SMALL_CONFIG
        path.write_text(text)
        code, _, err = run(capsys, "bump", str(path))
        assert code == 4 and "config error" in err

    def test_numerical_error(self, capsys, tmp_path):
        path = tmp_path / "calib.toml"
        path.write_text(SMALL_CONFIG + "reference_z = -40.0\n")
        code, _, err = run(capsys, "bump", str(path), "--seed", "1")
        assert code == 5 and "reference_z" in err

    def test_usage(self, capsys, config):
        assert run(capsys, "bump", str(config), "--toys", "10")[0] == 2
        assert run(capsys, "bump")[0] == 2


def test_console_script_entry_point(tmp_path):
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "jlparadox.cli", "pvalue", "--z", "5", "--p", "0.1"],
                          capture_output=True, env=env)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "jlparadox.cli", "pvalue", "--z", "1", "--json"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0 and json.loads(proc.stdout)["p"] == pytest.approx(0.15865525393145707)
