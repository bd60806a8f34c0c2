"""
Integration tests for the robust-mean-lab command line.

These tests drive cli.main() end to end against temporary config, dataset
and output files.

Run these tests:
    pytest tests/test_integration.py -v
"""

import csv
import json
import logging
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from robust_mean_lab import __version__
from robust_mean_lab.cli import main
from robust_mean_lab.constants import EXIT_ALL_TRIALS_FAILED, EXIT_AUDIT_FAILED, EXIT_CONFIG_ERROR, EXIT_OK
from robust_mean_lab.dataset_io import read_dataset
from robust_mean_lab.utils import LOGGER_NAME

pytestmark = pytest.mark.integration

TOML_CONFIG = """
[experiment]
n = 200
d = 3
trials = 6
master_seed = 11

[distribution]
kind = "gaussian"

[attack]
kind = "mean_shift"
eta = 0.1
magnitude = 50.0

[estimator]
name = "filter"

[estimator.params]
eta = 0.1
"""


@pytest.fixture(autouse=True)
def detach_cli_handler():
    """main() attaches a stderr handler; drop it so later tests start clean."""
    yield
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        if getattr(handler, "_robust_mean_lab", False):
            logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def toml_config(tmp_path):
    path = tmp_path / "experiment.toml"
    path.write_text(TOML_CONFIG, encoding="utf-8")
    return path


@pytest.fixture
def json_config(tmp_path, experiment_dict):
    def write(data=None, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data if data is not None else experiment_dict), encoding="utf-8")
        return path
    return write


class TestGenerateAndEstimate:
    """generate writes a dataset that estimate can read back."""

    def test_generate_csv_then_estimate(self, toml_config, tmp_path, capsys):
        data = tmp_path / "data.csv"
        assert main(["generate", "--config", str(toml_config), "--out", str(data)]) == EXIT_OK
        X = read_dataset(data)
        assert X.shape == (200, 3)
        assert int(np.count_nonzero(X.rows[:, 0] > 25.0)) == 20

        assert main(["estimate", "--data", str(data), "--estimator", "filter", "--param", "eta=0.1"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["estimator"] == "filter"
        assert len(payload["estimate"]) == 3
        assert np.linalg.norm(payload["estimate"]) < 1.0
        assert payload["removed"] >= 20

    def test_generate_binary(self, toml_config, tmp_path):
        data = tmp_path / "data.rmd1"
        assert main(["generate", "--config", str(toml_config), "--out", str(data), "--format", "rmd1"]) == EXIT_OK
        assert data.read_bytes()[:4] == b"RMD1"
        assert read_dataset(data).shape == (200, 3)

    def test_generate_is_seeded(self, toml_config, tmp_path):
        a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        main(["generate", "--config", str(toml_config), "--out", str(a)])
        main(["generate", "--config", str(toml_config), "--out", str(b)])
        main(["generate", "--config", str(toml_config), "--out", str(c), "--seed", "12"])
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()

    def test_generate_needs_out(self, toml_config):
        assert main(["generate", "--config", str(toml_config)]) == EXIT_CONFIG_ERROR

    def test_estimate_to_file(self, toml_config, tmp_path):
        data = tmp_path / "data.csv"
        out = tmp_path / "estimate.json"
        main(["generate", "--config", str(toml_config), "--out", str(data)])
        assert main(["estimate", "--data", str(data), "--estimator", "geometric_median", "--out", str(out)]) == EXIT_OK
        assert json.loads(out.read_text())["estimator"] == "geometric_median"

    def test_estimate_bad_dataset(self, tmp_path):
        data = tmp_path / "ragged.csv"
        data.write_text("1.0,2.0\n3.0\n", encoding="utf-8")
        assert main(["estimate", "--data", str(data), "--estimator", "empirical_mean"]) == EXIT_CONFIG_ERROR

    def test_estimate_bad_param(self, toml_config, tmp_path):
        data = tmp_path / "data.csv"
        main(["generate", "--config", str(toml_config), "--out", str(data)])
        assert main(["estimate", "--data", str(data), "--estimator", "empirical_mean", "--param", "k=3"]) == EXIT_CONFIG_ERROR
        assert main(["estimate", "--data", str(data), "--estimator", "empirical_mean", "--param", "k"]) == EXIT_CONFIG_ERROR


class TestRun:
    """Monte Carlo runs from TOML and JSON configs."""

    def test_run_writes_outputs(self, toml_config, tmp_path):
        prefix = tmp_path / "results" / "filter"
        assert main(["run", "--config", str(toml_config), "--out", str(prefix)]) == EXIT_OK
        with open(prefix.with_suffix(".csv"), newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["trial", "seed", "error", "runtime_ms", "warnings"]
        assert len(rows) == 7
        summary = json.loads(prefix.with_suffix(".json").read_text())
        assert summary["estimator"] == "filter"
        assert summary["summary"]["count"] == 6
        assert summary["summary"]["p99"] < 1.0

    def test_run_prints_summary(self, json_config, capsys):
        assert main(["run", "--config", str(json_config())]) == EXIT_OK
        row = json.loads(capsys.readouterr().out)
        assert row["count"] == 6
        assert row["failed"] == 0

    def test_output_from_config(self, json_config, experiment_dict, tmp_path):
        experiment_dict["experiment"]["output"] = str(tmp_path / "from_config")
        assert main(["run", "--config", str(json_config(experiment_dict))]) == EXIT_OK
        assert (tmp_path / "from_config.csv").exists()
        assert (tmp_path / "from_config.json").exists()

    def test_toml_and_json_identical_outputs(self, toml_config, json_config, experiment_dict, tmp_path):
        experiment_dict["estimator"] = {"name": "filter", "params": {"eta": 0.1}}
        main(["run", "--config", str(toml_config), "--out", str(tmp_path / "toml")])
        main(["run", "--config", str(json_config(experiment_dict)), "--out", str(tmp_path / "json")])
        assert (tmp_path / "toml.csv").read_bytes() == (tmp_path / "json.csv").read_bytes()
        assert (tmp_path / "toml.json").read_bytes() == (tmp_path / "json.json").read_bytes()

    def test_worker_count_does_not_change_outputs(self, toml_config, tmp_path):
        main(["run", "--config", str(toml_config), "--out", str(tmp_path / "one"), "--workers", "1"])
        main(["run", "--config", str(toml_config), "--out", str(tmp_path / "two"), "--workers", "2"])
        assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()
        assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()

    def test_seed_override(self, toml_config, tmp_path):
        main(["run", "--config", str(toml_config), "--out", str(tmp_path / "a")])
        main(["run", "--config", str(toml_config), "--out", str(tmp_path / "b"), "--seed", "12"])
        a = json.loads((tmp_path / "a.json").read_text())
        b = json.loads((tmp_path / "b.json").read_text())
        assert b["master_seed"] == 12
        assert a["config_sha256"] != b["config_sha256"]

    def test_missing_config(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "absent.toml")]) == EXIT_CONFIG_ERROR

    def test_config_required(self):
        assert main(["run"]) == EXIT_CONFIG_ERROR

    def test_unknown_key(self, json_config, experiment_dict):
        experiment_dict["experiment"]["repeats"] = 3
        assert main(["run", "--config", str(json_config(experiment_dict))]) == EXIT_CONFIG_ERROR

    def test_all_trials_failed(self, json_config, experiment_dict):
        experiment_dict["estimator"] = {"name": "mom_univariate"}
        assert main(["run", "--config", str(json_config(experiment_dict))]) == EXIT_ALL_TRIALS_FAILED


class TestSweep:
    """Sweeps over the config's grid."""

    def test_sweep_prints_rows(self, json_config, experiment_dict, capsys):
        experiment_dict["sweep"] = {"n": [200, 100]}
        assert main(["sweep", "--config", str(json_config(experiment_dict))]) == EXIT_OK
        lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
        assert [line["params"]["n"] for line in lines] == [100, 200]

    def test_sweep_writes_csv(self, json_config, experiment_dict, tmp_path):
        experiment_dict["sweep"] = {"attack.eta": [0.0, 0.1]}
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--config", str(json_config(experiment_dict)), "--out", str(out)]) == EXIT_OK
        with open(out, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0][0] == "attack.eta"
        assert [row[-1] for row in rows[1:]] == ["ok", "ok"]

    def test_sweep_all_cells_failed(self, json_config, experiment_dict):
        experiment_dict["estimator"] = {"name": "mom_univariate"}
        experiment_dict["sweep"] = {"n": [50, 100]}
        assert main(["sweep", "--config", str(json_config(experiment_dict))]) == EXIT_ALL_TRIALS_FAILED

    def test_sweep_without_grid(self, json_config):
        assert main(["sweep", "--config", str(json_config())]) == EXIT_CONFIG_ERROR


class TestAudit:
    """Exact privacy audits from the command line."""

    @pytest.mark.parametrize("mechanism", ["exponential", "inverse_sensitivity", "private_mom"])
    def test_audit_passes(self, mechanism, capsys):
        assert main(["audit", "--mechanism", mechanism, "--instances", "20"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["violations"] == 0
        assert payload["max_loss"] <= payload["epsilon"] + 1e-9

    def test_audit_violation_exit_code(self, mocker, capsys):
        mocker.patch("robust_mean_lab.bench.audit_mechanism", return_value=3.0)
        assert main(["audit", "--mechanism", "exponential", "--instances", "5"]) == EXIT_AUDIT_FAILED
        assert json.loads(capsys.readouterr().out)["violations"] == 5

    def test_audit_bad_epsilon(self):
        assert main(["audit", "--mechanism", "exponential", "--epsilon", "0"]) == EXIT_CONFIG_ERROR


class TestEntryPoint:
    """Parser behaviour and python -m."""

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_verbose_sets_debug_level(self, json_config):
        main(["-v", "run", "--config", str(json_config())])
        assert logging.getLogger(LOGGER_NAME).level == logging.DEBUG

    def test_python_m(self, tmp_path):
        src = Path(__file__).parent.parent / "src"
        env = dict(os.environ, PYTHONPATH=str(src) + os.pathsep + os.environ.get("PYTHONPATH", ""))
        result = subprocess.run(
            [sys.executable, "-m", "robust_mean_lab", "audit", "--mechanism", "exponential", "--instances", "3"],
            capture_output=True,
            text=True,
            env=env,
            check=False,
        )
        assert result.returncode == EXIT_OK
        assert json.loads(result.stdout)["instances"] == 3
