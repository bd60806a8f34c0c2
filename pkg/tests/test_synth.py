"""
Unit tests for synth module - clean distributions and adversaries.
"""

import numpy as np
import pytest

from robust_mean_lab.core import Dataset, RngStream, empirical_mean
from robust_mean_lab.errors import InfiniteVarianceError
from robust_mean_lab.synth import (
    ATTACK_REGISTRY,
    AttackSpec,
    AttackStrategy,
    DistributionSpec,
    contaminate,
    sample,
)


class TestDistributionSpec:
    """Test distribution validation and defaults."""

    def test_defaults(self):
        spec = DistributionSpec("gaussian", d=3)
        assert spec.mean.tolist() == [0.0, 0.0, 0.0]
        assert spec.covariance_diag.tolist() == [1.0, 1.0, 1.0]

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            DistributionSpec("cauchy", d=1)

    def test_mean_length_checked(self):
        with pytest.raises(ValueError):
            DistributionSpec("gaussian", d=2, mean=[1.0])

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            DistributionSpec("gaussian", d=2, covariance_diag=[1.0, -1.0])

    def test_student_t_requires_dof(self):
        with pytest.raises(ValueError):
            DistributionSpec("student_t", d=1)

    @pytest.mark.parametrize("dof", [1.0, 2.0])
    def test_student_t_infinite_variance(self, dof):
        with pytest.raises(InfiniteVarianceError, match="infinite variance"):
            DistributionSpec("student_t", d=1, dof=dof)


class TestSample:
    """Test sampling."""

    def test_shape_and_determinism(self, rng):
        spec = DistributionSpec("gaussian", d=4)
        a = sample(spec, 50, rng)
        b = sample(spec, 50, rng)
        assert a.shape == (50, 4)
        assert np.array_equal(a.rows, b.rows)

    def test_gaussian_moments(self, rng):
        spec = DistributionSpec("gaussian", d=2, mean=[3.0, -1.0], covariance_diag=[4.0, 0.25])
        X = sample(spec, 40000, rng)
        assert np.allclose(X.rows.mean(axis=0), [3.0, -1.0], atol=0.05)
        assert np.allclose(X.rows.var(axis=0), [4.0, 0.25], rtol=0.05)

    def test_student_t_unit_variance(self, rng):
        X = sample(DistributionSpec("student_t", d=1, dof=5.0), 100000, rng)
        assert X.rows.mean() == pytest.approx(0.0, abs=0.03)
        assert X.rows.var() == pytest.approx(1.0, rel=0.1)

    def test_zero_variance_coordinate(self, rng):
        X = sample(DistributionSpec("gaussian", d=2, mean=[7.0, 0.0], covariance_diag=[0.0, 1.0]), 10, rng)
        assert np.all(X.rows[:, 0] == 7.0)


class TestAttackSpec:
    """Test attack validation."""

    def test_corruption_count_rounds_up(self):
        assert AttackSpec("mean_shift", eta=0.1).corruption_count(100) == 10
        assert AttackSpec("mean_shift", eta=0.1).corruption_count(101) == 11
        assert AttackSpec("mean_shift", eta=0.0).corruption_count(100) == 0

    def test_none_attack_corrupts_nothing(self):
        assert AttackSpec("none", eta=0.3).corruption_count(100) == 0

    def test_direction_must_be_unit(self):
        with pytest.raises(ValueError):
            AttackSpec("mean_shift", eta=0.1, direction=[1.0, 1.0])

    def test_default_direction_is_e1(self):
        assert AttackSpec("mean_shift").resolved_direction(3).tolist() == [1.0, 0.0, 0.0]

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            AttackSpec("teleport", eta=0.1)

    def test_negative_magnitude(self):
        with pytest.raises(ValueError):
            AttackSpec("mean_shift", eta=0.1, magnitude=-1.0)

    def test_registry_holds_strategies(self):
        assert set(ATTACK_REGISTRY) == {"mean_shift", "spike_first_coordinate", "variance_inflation", "subtractive_tail"}
        assert all(issubclass(cls, AttackStrategy) for cls in ATTACK_REGISTRY.values())


class TestContaminate:
    """Test the adversaries."""

    @pytest.fixture
    def clean(self, rng):
        return sample(DistributionSpec("gaussian", d=3), 200, rng.spawn(0))

    def _untouched(self, clean, result):
        keep = np.setdiff1d(np.arange(clean.n), result.corrupted)
        return np.array_equal(clean.rows[keep], result.dataset.rows[keep])

    @pytest.mark.parametrize("kind", sorted(ATTACK_REGISTRY))
    def test_exact_count_and_untouched_rows(self, clean, rng, kind):
        result = contaminate(clean, AttackSpec(kind, eta=0.1, magnitude=5.0), rng.spawn(1))
        assert len(result.corrupted) == 20
        assert len(set(result.corrupted)) == 20
        assert list(result.corrupted) == sorted(result.corrupted)
        assert self._untouched(clean, result)

    def test_mean_shift_places_points(self, clean, rng):
        mu_hat = empirical_mean(clean)
        result = contaminate(clean, AttackSpec("mean_shift", eta=0.1, magnitude=100.0), rng.spawn(1))
        expected = mu_hat + np.array([100.0, 0.0, 0.0])
        for i in result.corrupted:
            assert np.allclose(result.dataset.rows[i], expected)

    def test_spike_ignores_direction(self, clean, rng):
        mu_hat = empirical_mean(clean)
        attack = AttackSpec("spike_first_coordinate", eta=0.05, magnitude=10.0, direction=[0.0, 1.0, 0.0])
        result = contaminate(clean, attack, rng.spawn(1))
        row = result.dataset.rows[result.corrupted[0]]
        assert row[0] == pytest.approx(mu_hat[0] + 10.0)
        assert row[1] == pytest.approx(mu_hat[1])

    def test_variance_inflation_splits(self, clean, rng):
        mu_hat = empirical_mean(clean)
        result = contaminate(clean, AttackSpec("variance_inflation", eta=0.025, magnitude=20.0), rng.spawn(1))
        firsts = sorted(result.dataset.rows[list(result.corrupted), 0] - mu_hat[0])
        assert len(firsts) == 5
        assert np.allclose(firsts, [-20.0, -20.0, 20.0, 20.0, 20.0])

    def test_subtractive_tail_removes_top_projections(self, clean, rng):
        mu_hat = empirical_mean(clean)
        result = contaminate(clean, AttackSpec("subtractive_tail", eta=0.05), rng.spawn(1))
        top = np.argsort(-clean.rows[:, 0], kind="stable")[:10]
        assert set(result.corrupted) == set(int(i) for i in top)
        for i in result.corrupted:
            assert np.allclose(result.dataset.rows[i], mu_hat)

    def test_deterministic_given_rng(self, clean, rng):
        attack = AttackSpec("mean_shift", eta=0.2, magnitude=3.0)
        a = contaminate(clean, attack, rng.spawn(5))
        b = contaminate(clean, attack, rng.spawn(5))
        assert a.corrupted == b.corrupted
        assert np.array_equal(a.dataset.rows, b.dataset.rows)

    def test_no_corruption_returns_input(self, clean, rng):
        result = contaminate(clean, AttackSpec("none", eta=0.5), rng)
        assert result.dataset is clean
        assert result.corrupted == ()

    def test_full_corruption_allowed_below_one(self, rng):
        X = Dataset(np.zeros((3, 1)))
        result = contaminate(X, AttackSpec("mean_shift", eta=0.99, magnitude=1.0), rng)
        assert result.corrupted == (0, 1, 2)
        assert np.all(result.dataset.rows == 1.0)

    def test_input_not_mutated(self, clean, rng):
        before = clean.rows.copy()
        contaminate(clean, AttackSpec("mean_shift", eta=0.3, magnitude=9.0), rng)
        assert np.array_equal(clean.rows, before)
