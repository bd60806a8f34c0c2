# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Contamination-robust estimation by spectral filtering.

Architecture:
    - check_stability(): brute-force stability oracle (n <= 20)
    - certify_spectral_center(): capped-simplex weights bounding the weighted
      second-moment spectral norm around a candidate center
    - filter_mean(): iterative eigenvalue filter
    - exhaustive_subset_mean(): the exponential-time subset search the filter
      replaces (n <= 20)
    - TailModel: abstract base class for the predicted projection tails,
      registered in TAIL_MODEL_REGISTRY

Usage:
    cfg = FilterConfig(eta=0.1)
    report = filter_mean(X, cfg, RngStream(seed))
    if report.ok:
        print(report.estimate, report.final_top_eigenvalue)
"""

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Set, Tuple, Type

import numpy as np

from .constants import (
    DEFAULT_EIGEN_TOL,
    DEFAULT_REMOVAL_CAP_MULTIPLIER,
    DEFAULT_SPECTRAL_CERTIFY_ROUNDS,
    DEFAULT_TAIL_SLACK,
    DEFAULT_THRESHOLD_CONSTANT,
    FILTER_ETA_MAX,
    MIN_THRESHOLD,
    ORACLE_CHUNK_SIZE,
    STABILITY_ORACLE_MAX_N,
    TAIL_FACTOR,
    TAIL_MODEL_BOUNDED_COVARIANCE,
    TAIL_MODEL_GAUSSIAN,
    WARN_EIGEN_NOT_CONVERGED,
    WARN_NO_STABLE_SUBSET,
    WARN_REMOVAL_CAP,
)
from .core import (
    DatasetLike,
    Eigenpair,
    EstimatorReport,
    RngStream,
    as_dataset,
    empirical_covariance,
    top_eigenpair,
)
from .errors import ConvergenceError, FilterExhaustedError, OracleScaleError
from .utils import log_debug, log_warning, logged_estimator
from .validation import InputValidator


class TailModel(ABC):
    """Predicted fraction of clean points whose projection exceeds L."""

    @abstractmethod
    def predicted_tail(self, L: np.ndarray, slack: float) -> np.ndarray:
        pass


class GaussianTail(TailModel):
    def predicted_tail(self, L, slack):
        return TAIL_FACTOR * np.exp(-np.square(L) / 2.0) + slack


class BoundedCovarianceTail(TailModel):
    """Chebyshev-style tail for data with covariance bounded by the identity."""

    def predicted_tail(self, L, slack):
        return TAIL_FACTOR / np.square(L) + slack


TAIL_MODEL_REGISTRY: Dict[str, Type[TailModel]] = {
    TAIL_MODEL_GAUSSIAN: GaussianTail,
    TAIL_MODEL_BOUNDED_COVARIANCE: BoundedCovarianceTail,
}


@dataclass(frozen=True)
class StabilityParams:
    """(gamma, delta1, delta2) stability parameters; gamma in (0, 1/2]."""

    gamma: float
    delta1: float
    delta2: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "gamma", InputValidator.validate_float(self.gamma, 0.0, 0.5, inclusive_min=False)
        )
        object.__setattr__(self, "delta1", InputValidator.validate_float(self.delta1, 0.0))
        object.__setattr__(self, "delta2", InputValidator.validate_float(self.delta2, 0.0))


@dataclass(frozen=True, eq=False)
class SpectralCertificate:
    """Weights w in the capped simplex with ||sum_i w_i (X_i - nu)(X_i - nu)^T|| = lambda_.

    direction is the top eigenvector of the weighted matrix.
    """

    nu: np.ndarray
    gamma: float
    lambda_: float
    weights: np.ndarray
    direction: np.ndarray

    @property
    def weight_cap(self) -> float:
        return 1.0 / ((1.0 - self.gamma) * self.weights.shape[0])


@dataclass(frozen=True)
class FilterConfig:
    """Eigenvalue-filter settings.

    variance_scale multiplies the identity-covariance assumption: the gate
    becomes variance_scale * (1 + C eta log(1/eta)) and projections are
    normalised by sqrt(variance_scale) before thresholding.
    """

    eta: float
    threshold_constant: float = DEFAULT_THRESHOLD_CONSTANT
    tail_slack: float = DEFAULT_TAIL_SLACK
    removal_cap_multiplier: float = DEFAULT_REMOVAL_CAP_MULTIPLIER
    tail_model: str = TAIL_MODEL_GAUSSIAN
    variance_scale: float = 1.0
    eigen_tol: float = DEFAULT_EIGEN_TOL

    def __post_init__(self) -> None:
        InputValidator.validate_float(self.eta, 0.0, FILTER_ETA_MAX, inclusive_min=False, inclusive_max=False)
        InputValidator.validate_float(self.threshold_constant, 0.0, inclusive_min=False)
        InputValidator.validate_float(self.tail_slack, 0.0)
        InputValidator.validate_float(self.removal_cap_multiplier, 0.0)
        InputValidator.validate_choice(self.tail_model, TAIL_MODEL_REGISTRY, "tail_model")
        InputValidator.validate_float(self.variance_scale, 0.0, inclusive_min=False)
        InputValidator.validate_float(self.eigen_tol, 0.0, inclusive_min=False)

    @property
    def gate(self) -> float:
        eta = self.eta
        return self.variance_scale * (1.0 + self.threshold_constant * eta * math.log(1.0 / eta))

    def removal_cap(self, n: int) -> float:
        return self.removal_cap_multiplier * self.eta * n + math.log(n)


def _subset_chunks(n: int, min_size: int, largest_first: bool = False) -> Iterator[np.ndarray]:
    """Index arrays of every subset of [n] with size >= min_size, chunked by size."""
    sizes = range(n, min_size - 1, -1) if largest_first else range(min_size, n + 1)
    for size in sizes:
        combos = itertools.combinations(range(n), size)
        while True:
            chunk = list(itertools.islice(combos, ORACLE_CHUNK_SIZE))
            if not chunk:
                break
            yield np.asarray(chunk, dtype=np.intp)


def _subset_moments(rows: np.ndarray, idx: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    sub = rows[idx]
    means = sub.mean(axis=1)
    centered = sub - means[:, None, :]
    covs = np.einsum("msi,msj->mij", centered, centered) / idx.shape[1]
    return means, covs


def _min_subset_size(n: int, fraction_removed: float) -> int:
    return max(1, math.ceil(round((1.0 - fraction_removed) * n, 9)))


def check_stability(X: DatasetLike, mu: Sequence[float], p: StabilityParams) -> bool:
    """Brute-force stability check.

    True iff every subset S with |S| >= (1 - gamma) n has
    ||mu_S - mu|| <= delta1 and ||Sigma_S - I|| <= delta2.

    Raises:
        OracleScaleError: If n > 20
    """
    dataset = as_dataset(X)
    if dataset.n > STABILITY_ORACLE_MAX_N:
        raise OracleScaleError()
    mu = InputValidator.validate_vector(mu, length=dataset.d, name="mu")
    eye = np.eye(dataset.d)

    for idx in _subset_chunks(dataset.n, _min_subset_size(dataset.n, p.gamma)):
        means, covs = _subset_moments(dataset.rows, idx)
        if np.any(np.linalg.norm(means - mu, axis=1) > p.delta1):
            return False
        spectral = np.max(np.abs(np.linalg.eigvalsh(covs - eye)), axis=1)
        if np.any(spectral > p.delta2):
            return False
    return True


def _top_pair(M: np.ndarray, tol: float, rng: RngStream, warnings: Set[str]) -> Eigenpair:
    try:
        return top_eigenpair(M, tol=tol, rng=rng)
    except ConvergenceError as e:
        warnings.add(WARN_EIGEN_NOT_CONVERGED)
        log_warning(str(e))
        return Eigenpair(e.best_value, e.best_vector)


def certify_spectral_center(
    X: DatasetLike,
    nu: Sequence[float],
    gamma: float,
    rounds: int = DEFAULT_SPECTRAL_CERTIFY_ROUNDS,
    rng: Optional[RngStream] = None,
) -> SpectralCertificate:
    """Greedy spectral-center certificate.

    Frank-Wolfe on lambda_max of the weighted second-moment matrix over the
    capped simplex: each round puts full weight cap on the points with the
    smallest squared projection on the current top eigenvector and mixes that
    vertex in with step 2/(t+2). The best weights seen are returned, so lambda_
    is an upper bound on the true minimum. gamma = 0 forces uniform weights.
    """
    dataset = as_dataset(X)
    gamma = InputValidator.validate_float(gamma, 0.0, 0.5)
    nu = InputValidator.validate_vector(nu, length=dataset.d, name="nu")
    rounds = InputValidator.validate_integer(rounds, 0)
    rng = rng or RngStream(0)
    n = dataset.n
    Z = dataset.rows - nu
    cap = 1.0 / ((1.0 - gamma) * n)
    warnings: Set[str] = set()

    def evaluate(w: np.ndarray, key: int) -> Eigenpair:
        M = (Z * w[:, None]).T @ Z
        value, vector = _top_pair((M + M.T) / 2.0, DEFAULT_EIGEN_TOL, rng.spawn(key), warnings)
        return Eigenpair(max(0.0, value), vector)

    w = np.full(n, 1.0 / n)
    best_w, (best_lambda, best_v) = w, evaluate(w, 0)
    lam, v = best_lambda, best_v

    full = int(math.floor(1.0 / cap + 1e-12))
    if gamma > 0 and full < n:
        for t in range(rounds):
            if lam == 0.0:
                break
            order = np.argsort(np.square(Z @ v), kind="stable")
            vertex = np.zeros(n)
            vertex[order[:full]] = cap
            if full < n:
                vertex[order[full]] = max(0.0, 1.0 - full * cap)
            step = 2.0 / (t + 2.0)
            w = (1.0 - step) * w + step * vertex
            lam, v = evaluate(w, t + 1)
            if lam < best_lambda:
                best_w, best_lambda, best_v = w, lam, v

    return SpectralCertificate(
        nu=nu, gamma=gamma, lambda_=float(best_lambda), weights=best_w, direction=best_v
    )


def _threshold_removal(t: np.ndarray, cfg: FilterConfig) -> np.ndarray:
    """Boolean mask of points to drop for normalised projections t."""
    ts = np.sort(t)[::-1]
    counts = np.searchsorted(-ts, -ts, side="right")
    tail = counts / t.shape[0]
    predicted = TAIL_MODEL_REGISTRY[cfg.tail_model]().predicted_tail(ts, cfg.tail_slack)
    qualifies = (ts >= MIN_THRESHOLD) & (tail > predicted)

    if np.any(qualifies):
        L = ts[int(np.argmax(qualifies))]
        return t >= L

    mask = np.zeros(t.shape[0], dtype=bool)
    mask[int(np.argmax(t))] = True
    return mask


@logged_estimator("filter_mean")
def filter_mean(X: DatasetLike, cfg: FilterConfig, rng: RngStream) -> EstimatorReport:
    """Iterative eigenvalue filter.

    Each round computes the mean, covariance and top eigenpair of the
    surviving points. If the top eigenvalue passes the gate the mean is
    returned. Otherwise the points are scanned by |<v, X_i - mu>| (normalised
    by sqrt(variance_scale)) for the largest threshold L >= 2 whose empirical
    tail exceeds the tail model's prediction, and every point at or beyond L
    is removed; when no threshold qualifies the single farthest point goes.

    Args:
        X: Samples, n >= 2
        cfg: Filter configuration
        rng: Stream for the eigen-solver starts

    Returns:
        EstimatorReport; removal beyond cfg.removal_cap(n) stops the loop with
        the removal_cap_exceeded warning

    Raises:
        FilterExhaustedError: If every point would be removed
    """
    dataset = as_dataset(X)
    n = dataset.n
    if n < 2:
        raise ValueError("filter_mean needs at least two samples")

    gate = cfg.gate
    cap = cfg.removal_cap(n)
    scale = math.sqrt(cfg.variance_scale)
    active = np.arange(n)
    warnings: Set[str] = set()

    def report(mu: np.ndarray, iterations: int, lam: float) -> EstimatorReport:
        removed = np.setdiff1d(np.arange(n), active)
        return EstimatorReport(
            mu,
            iterations=iterations,
            removed_indices=tuple(removed),
            final_top_eigenvalue=lam,
            warnings=warnings,
            details={"gate": gate, "surviving": int(active.shape[0])},
        )

    for iteration in range(1, n + 1):
        rows = dataset.rows[active]
        mu = rows.mean(axis=0)
        lam, v = _top_pair(empirical_covariance(rows), cfg.eigen_tol, rng.spawn(iteration), warnings)
        if lam <= gate:
            return report(mu, iteration, lam)

        drop = _threshold_removal(np.abs((rows - mu) @ v) / scale, cfg)
        if np.all(drop):
            raise FilterExhaustedError()
        if n - active.shape[0] + int(np.count_nonzero(drop)) > cap:
            warnings.add(WARN_REMOVAL_CAP)
            log_debug(f"filter_mean hit removal cap {cap:.1f} at iteration {iteration}")
            return report(mu, iteration, lam)

        active = active[~drop]
        log_debug(f"filter_mean iteration {iteration}: lambda={lam:.4g}, dropped {int(drop.sum())}")

    # unreachable: every iteration removes at least one point
    raise FilterExhaustedError()


@logged_estimator("exhaustive_subset_mean")
def exhaustive_subset_mean(
    X: DatasetLike,
    eta: float,
    threshold_constant: float = DEFAULT_THRESHOLD_CONSTANT,
) -> EstimatorReport:
    """Mean of the largest subset (size >= (1 - eta) n) whose covariance passes the gate.

    Subsets are scanned largest first, lexicographically within a size. When
    none passes, the subset with the smallest top eigenvalue is returned with
    the no_stable_subset warning.

    Raises:
        OracleScaleError: If n > 20
    """
    dataset = as_dataset(X)
    if dataset.n > STABILITY_ORACLE_MAX_N:
        raise OracleScaleError()
    gate = FilterConfig(eta=eta, threshold_constant=threshold_constant).gate
    n = dataset.n

    best: Tuple[float, Optional[np.ndarray], Optional[np.ndarray]] = (math.inf, None, None)
    for idx in _subset_chunks(n, _min_subset_size(n, eta), largest_first=True):
        means, covs = _subset_moments(dataset.rows, idx)
        tops = np.linalg.eigvalsh(covs)[:, -1]
        passing = np.flatnonzero(tops <= gate)
        if passing.size:
            j = int(passing[0])
            return EstimatorReport(
                means[j],
                iterations=1,
                removed_indices=tuple(np.setdiff1d(np.arange(n), idx[j])),
                final_top_eigenvalue=float(tops[j]),
            )
        j = int(np.argmin(tops))
        if tops[j] < best[0]:
            best = (float(tops[j]), means[j], idx[j])

    lam, mean, kept = best
    return EstimatorReport(
        mean,
        iterations=1,
        removed_indices=tuple(np.setdiff1d(np.arange(n), kept)),
        final_top_eigenvalue=lam,
        warnings={WARN_NO_STABLE_SUBSET},
    )


__all__ = [
    "TailModel",
    "TAIL_MODEL_REGISTRY",
    "StabilityParams",
    "SpectralCertificate",
    "FilterConfig",
    "check_stability",
    "certify_spectral_center",
    "filter_mean",
    "exhaustive_subset_mean",
]
