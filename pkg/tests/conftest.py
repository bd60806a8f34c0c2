"""
Pytest configuration and shared fixtures.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src directory to path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from robust_mean_lab.core import Dataset, RngStream  # noqa: E402
from robust_mean_lab.utils import CONFIG_ENV_VAR, reset_config_cache  # noqa: E402


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    """Every test starts from the packaged defaults."""
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    reset_config_cache()
    yield
    reset_config_cache()


@pytest.fixture
def rng():
    """A fixed stream; tests that need several draws spawn from it."""
    return RngStream(master_seed=20250101, stream_id=0)


@pytest.fixture
def gaussian_data(rng):
    """400 standard Gaussian samples in dimension 5 around the origin."""
    gen = rng.spawn(99).generator()
    return Dataset(gen.standard_normal((400, 5)))


@pytest.fixture
def worked_filter_example():
    """90 points at +-1 on e1 and 10 outliers at 50 e1, in dimension 2."""
    rows = np.zeros((100, 2))
    rows[:45, 0] = 1.0
    rows[45:90, 0] = -1.0
    rows[90:, 0] = 50.0
    return Dataset(rows)


@pytest.fixture
def experiment_dict():
    """A small, fast experiment config in dict form."""
    return {
        "experiment": {"n": 200, "d": 3, "trials": 6, "master_seed": 11},
        "distribution": {"kind": "gaussian"},
        "attack": {"kind": "mean_shift", "eta": 0.1, "magnitude": 50.0},
        "estimator": {"name": "coordinate_median"},
    }


@pytest.fixture
def user_config(tmp_path, monkeypatch):
    """Point ROBUST_MEAN_LAB_CONFIG at a temporary JSON file and return its path."""
    path = tmp_path / "user_config.json"
    path.write_text("{}", encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    reset_config_cache()
    return path
