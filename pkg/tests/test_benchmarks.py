"""
Performance benchmarks for critical code paths.

Run with: pytest tests/test_benchmarks.py --benchmark-only
Compare: pytest tests/test_benchmarks.py --benchmark-compare
"""

import numpy as np
import pytest

from robust_mean_lab.classic import coordinate_wise_median, geometric_median, tukey_depth
from robust_mean_lab.core import RngStream, empirical_covariance, top_eigenpair
from robust_mean_lab.dp import PrivacyBudget, build_cover, private_mom_candidates
from robust_mean_lab.filtering import FilterConfig, filter_mean
from robust_mean_lab.mom import MoMConfig, combinatorial_scores, direction_net, heavy_tailed_mean
from robust_mean_lab.synth import AttackSpec, DistributionSpec, contaminate, sample
from robust_mean_lab.validation import InputValidator, sanitize_for_logging


@pytest.fixture(scope="module")
def contaminated():
    stream = RngStream(2024)
    clean = sample(DistributionSpec("gaussian", d=32), 1600, stream.spawn(0))
    return contaminate(clean, AttackSpec("mean_shift", eta=0.1, magnitude=100.0), stream.spawn(1)).dataset


class TestLinearAlgebraBenchmarks:
    """Benchmark the moment and eigenpair primitives."""

    def test_benchmark_covariance(self, benchmark, contaminated):
        cov = benchmark(empirical_covariance, contaminated)
        assert cov.shape == (32, 32)

    def test_benchmark_top_eigenpair(self, benchmark, contaminated):
        cov = empirical_covariance(contaminated)
        lam, _ = benchmark(top_eigenpair, cov, 1e-9, RngStream(1))
        assert lam == pytest.approx(np.linalg.eigvalsh(cov)[-1], rel=1e-6)


class TestEstimatorBenchmarks:
    """Benchmark the estimators at desk scale."""

    def test_benchmark_coordinate_median(self, benchmark, contaminated):
        result = benchmark(coordinate_wise_median, contaminated)
        assert result.shape == (32,)

    def test_benchmark_geometric_median(self, benchmark, contaminated):
        report = benchmark(geometric_median, contaminated)
        assert np.linalg.norm(report.estimate) < 5.0

    def test_benchmark_filter_mean(self, benchmark, contaminated):
        report = benchmark(filter_mean, contaminated, FilterConfig(eta=0.1), RngStream(3))
        assert np.linalg.norm(report.estimate) < 1.0

    def test_benchmark_heavy_tailed_mean(self, benchmark, contaminated):
        report = benchmark(heavy_tailed_mean, contaminated, MoMConfig(beta=0.01, eta=0.1), RngStream(4))
        assert report.estimate.shape == (32,)

    def test_benchmark_tukey_depth(self, benchmark, contaminated):
        depth = benchmark(tukey_depth, contaminated, np.zeros(32), 256, RngStream(5))
        assert 0.0 <= depth <= 0.5


class TestPrivacyBenchmarks:
    """Benchmark cover construction and scoring."""

    def test_benchmark_build_cover(self, benchmark):
        cover = benchmark(build_cover, 3, 1.7, 0.1)
        assert len(cover) > 1000

    def test_benchmark_combinatorial_scores(self, benchmark):
        gen = RngStream(6).generator()
        Y = gen.standard_normal((100, 2))
        centers = gen.standard_normal((2000, 2))
        scores = benchmark(combinatorial_scores, Y, centers, 0.1, direction_net(2, 360))
        assert scores.shape == (2000,)

    def test_benchmark_private_mom_candidates(self, benchmark):
        X = sample(DistributionSpec("gaussian", d=2), 20000, RngStream(7))
        S = benchmark(private_mom_candidates, X, PrivacyBudget(2.0))
        assert len(S) > 1000


class TestValidationBenchmarks:
    """Benchmark validation helpers on the hot path."""

    def test_benchmark_validate_float(self, benchmark):
        result = benchmark(InputValidator.validate_float, 1.5, min_val=0.0, max_val=2.0)
        assert result == 1.5

    def test_benchmark_validate_unit_vector(self, benchmark):
        v = np.ones(64) / 8.0
        result = benchmark(InputValidator.validate_unit_vector, v)
        assert result.shape == (64,)

    def test_benchmark_sanitize_array(self, benchmark):
        result = benchmark(sanitize_for_logging, {"X": np.zeros((1000, 10)), "k": 3})
        assert "shape=(1000, 10)" in result
