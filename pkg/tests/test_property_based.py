"""
Property-based tests using Hypothesis for estimator invariants.

These tests generate hundreds of random inputs to check the algebraic
properties every estimator relies on: equivariance of the moments, eigenpair
residuals, clipping, mechanism normalisation and the privacy-loss bound.
"""

import math

import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from robust_mean_lab.bench import nearest_rank
from robust_mean_lab.classic import coordinate_wise_median, median
from robust_mean_lab.core import Dataset, RngStream, empirical_covariance, empirical_mean, top_eigenpair
from robust_mean_lab.dp import (
    audit_mechanism,
    clip,
    exponential_mechanism_probabilities,
    inverse_sensitivity_scores,
)
from robust_mean_lab.synth import AttackSpec, DistributionSpec, contaminate, sample
from robust_mean_lab.validation import MAX_LOG_MESSAGE_LENGTH, InputValidator, sanitize_for_logging

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
PROPERTY_SETTINGS = settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _matrix(seed, n, d):
    return RngStream(seed).generator().standard_normal((n, d))


class TestMomentsPropertyBased:
    """Property-based tests for the empirical moments."""

    @given(seeds, st.integers(1, 30), st.integers(1, 6), finite)
    @PROPERTY_SETTINGS
    def test_mean_translation_equivariant(self, seed, n, d, shift):
        rows = _matrix(seed, n, d)
        c = np.full(d, shift)
        assert np.allclose(empirical_mean(Dataset(rows + c)), empirical_mean(Dataset(rows)) + c, atol=1e-9)

    @given(seeds, st.integers(2, 30), st.integers(1, 6), finite)
    @PROPERTY_SETTINGS
    def test_covariance_translation_invariant(self, seed, n, d, shift):
        rows = _matrix(seed, n, d)
        assert np.allclose(empirical_covariance(rows + shift), empirical_covariance(rows), atol=1e-8)

    @given(seeds, st.integers(2, 30), st.integers(1, 6))
    @PROPERTY_SETTINGS
    def test_covariance_rotation_equivariant(self, seed, n, d):
        rows = _matrix(seed, n, d)
        R, _ = np.linalg.qr(RngStream(seed, 1).generator().standard_normal((d, d)))
        assert np.allclose(empirical_covariance(rows @ R), R.T @ empirical_covariance(rows) @ R, atol=1e-10)

    @given(seeds, st.integers(2, 30), st.integers(1, 6))
    @PROPERTY_SETTINGS
    def test_covariance_is_psd(self, seed, n, d):
        cov = empirical_covariance(_matrix(seed, n, d))
        assert np.allclose(cov, cov.T)
        assert np.linalg.eigvalsh(cov)[0] >= -1e-10


class TestEigenpairPropertyBased:
    """Property-based tests for top_eigenpair."""

    @given(seeds, st.integers(1, 8))
    @PROPERTY_SETTINGS
    def test_residual_and_value(self, seed, d):
        B = _matrix(seed, d, d)
        M = B + B.T
        tol = 1e-9
        lam, v = top_eigenpair(M, tol=tol, rng=RngStream(seed, 2))
        assert math.isclose(float(np.linalg.norm(v)), 1.0, rel_tol=1e-9)
        assert np.linalg.norm(M @ v - lam * v) <= tol * max(1.0, lam)
        assert lam >= v @ M @ v - tol
        assert abs(lam - np.linalg.eigvalsh(M)[-1]) <= 1e-6 * max(1.0, abs(lam))


class TestMediansPropertyBased:
    """Property-based tests for medians."""

    @given(st.lists(finite, min_size=1, max_size=60))
    @PROPERTY_SETTINGS
    def test_median_between_extremes(self, xs):
        m = median(xs)
        assert min(xs) <= m <= max(xs)

    @given(st.lists(finite, min_size=1, max_size=60))
    @PROPERTY_SETTINGS
    def test_median_splits_the_sample(self, xs):
        m = median(xs)
        assert sum(x < m for x in xs) <= len(xs) / 2
        assert sum(x > m for x in xs) <= len(xs) / 2

    @given(seeds, st.integers(1, 30), st.integers(1, 5), finite)
    @PROPERTY_SETTINGS
    def test_coordinate_median_translation_equivariant(self, seed, n, d, shift):
        rows = _matrix(seed, n, d)
        assert np.allclose(coordinate_wise_median(rows + shift), coordinate_wise_median(rows) + shift, atol=1e-9)


class TestPrivacyPropertyBased:
    """Property-based tests for clipping and the finite mechanisms."""

    @given(st.lists(finite, min_size=1, max_size=10), st.floats(min_value=1e-3, max_value=1e3))
    @PROPERTY_SETTINGS
    def test_clip_bounded_and_idempotent(self, x, tau):
        once = clip(x, tau)
        assert np.linalg.norm(once) <= tau * (1 + 1e-12)
        assert np.linalg.norm(once) <= np.linalg.norm(x) * (1 + 1e-12)
        assert np.allclose(clip(once, tau), once)

    @given(st.lists(st.floats(min_value=-50, max_value=0), min_size=1, max_size=30), st.floats(0.01, 10.0))
    @PROPERTY_SETTINGS
    def test_probabilities_normalised(self, scores, epsilon):
        p = exponential_mechanism_probabilities(scores, epsilon)
        assert abs(p.sum() - 1.0) <= 1e-12
        assert np.all(p >= 0)
        assert p[int(np.argmax(scores))] == p.max()

    @given(seeds, st.integers(2, 20), st.floats(0.05, 5.0))
    @PROPERTY_SETTINGS
    def test_neighbouring_scores_within_epsilon(self, seed, m, epsilon):
        gen = RngStream(seed).generator()
        scores = gen.uniform(-20.0, 0.0, size=m)
        neighbour = scores + gen.uniform(-1.0, 1.0, size=m)
        p = exponential_mechanism_probabilities(scores, epsilon)
        q = exponential_mechanism_probabilities(neighbour, epsilon)
        assert audit_mechanism(p, q) <= epsilon + 1e-9

    @given(st.lists(finite, min_size=1, max_size=40))
    @PROPERTY_SETTINGS
    def test_sample_median_scores_zero(self, xs):
        grid = [median(xs), max(xs) + 1.0]
        scores = inverse_sensitivity_scores(xs, grid)
        assert scores[0] == 0
        assert np.all(scores <= 0)


class TestAdversaryPropertyBased:
    """Property-based tests for contamination."""

    @given(seeds, st.integers(1, 80), st.floats(0.0, 0.9), st.sampled_from(["mean_shift", "variance_inflation", "subtractive_tail"]))
    @PROPERTY_SETTINGS
    def test_exact_corruption_count(self, seed, n, eta, kind):
        clean = sample(DistributionSpec("gaussian", d=2), n, RngStream(seed))
        result = contaminate(clean, AttackSpec(kind, eta=eta, magnitude=3.0), RngStream(seed, 1))
        assert len(result.corrupted) == math.ceil(round(eta * n, 9))
        keep = np.setdiff1d(np.arange(n), result.corrupted)
        assert np.array_equal(result.dataset.rows[keep], clean.rows[keep])


class TestHarnessPropertyBased:
    """Property-based tests for summaries and validation helpers."""

    @given(st.lists(finite, min_size=1, max_size=100), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    @PROPERTY_SETTINGS
    def test_nearest_rank_is_monotone_member(self, values, q1, q2):
        lo, hi = sorted((q1, q2))
        assert nearest_rank(values, lo) in values
        assert nearest_rank(values, lo) <= nearest_rank(values, hi)

    @given(st.integers(min_value=0, max_value=100))
    @PROPERTY_SETTINGS
    def test_validate_integer_within_range_succeeds(self, value):
        assert InputValidator.validate_integer(value, min_val=0, max_val=100) == value

    @given(st.text(min_size=0, max_size=1000))
    @PROPERTY_SETTINGS
    def test_sanitize_bounded_length(self, text):
        assert len(sanitize_for_logging(text)) <= MAX_LOG_MESSAGE_LENGTH + 3
