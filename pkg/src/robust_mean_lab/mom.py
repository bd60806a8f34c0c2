# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Median-of-means machinery.

Components:
    - bucket_means(), mom_univariate(): bucketing and the univariate estimator
    - simple_median(): bucket mean closest to a majority of the others
    - combinatorial_score() and friends: how many bucket means sit sqrt(lambda)
      beyond a center in the worst direction, over a direction net or exactly
      (d = 1 two directions, d = 2 arc sweep)
    - descent_center(), stability_aggregator(): multivariate aggregators
    - heavy_tailed_mean(): bucket, then aggregate with the configured rule
    - AGGREGATOR_REGISTRY: aggregator name -> callable

Usage:
    >>> cfg = MoMConfig(beta=0.01, eta=0.05, aggregator="stability")
    >>> report = heavy_tailed_mean(X, cfg, RngStream(seed))
    >>> report.details["k"]
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist

from .classic import coordinate_wise_median, median
from .constants import (
    AGGREGATOR_DESCENT,
    AGGREGATOR_SIMPLE_MEDIAN,
    AGGREGATOR_STABILITY,
    DEFAULT_DESCENT_MAX_ITERS,
    DEFAULT_K_CONSTANT,
    DEFAULT_LAMBDA_CONSTANT,
    DEFAULT_MOM_GAMMA,
    DEFAULT_NET_RESOLUTION,
    DEFAULT_THRESHOLD_CONSTANT,
    FILTER_ETA_MAX,
    SIMPLE_MEDIAN_QUANTILE,
    TAIL_MODEL_BOUNDED_COVARIANCE,
    WARN_MAX_ITERS,
)
from .core import DatasetLike, EstimatorReport, RngStream, as_dataset
from .errors import BucketCountError
from .filtering import FilterConfig, certify_spectral_center, filter_mean
from .utils import log_debug, logged_estimator
from .validation import InputValidator

# Arc membership slack for the exact d = 2 sweep (radians)
ARC_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class BucketMeans:
    """Per-bucket means Y (k x d) with the assignment that produced them.

    Bucket j holds the rows permutation[boundaries[j]:boundaries[j+1]].
    """

    Y: np.ndarray
    permutation: np.ndarray
    boundaries: np.ndarray
    n_samples: int

    @property
    def k(self) -> int:
        return int(self.Y.shape[0])

    @property
    def d(self) -> int:
        return int(self.Y.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.k, self.d)

    @classmethod
    def from_means(cls, Y: DatasetLike, n_samples: Optional[int] = None) -> "BucketMeans":
        """Wrap precomputed bucket means (one sample per bucket unless n_samples is given)."""
        rows = as_dataset(Y).rows
        k = rows.shape[0]
        return cls(
            Y=rows,
            permutation=np.arange(k),
            boundaries=np.arange(k + 1),
            n_samples=k if n_samples is None else int(n_samples),
        )


BucketLike = Union[BucketMeans, DatasetLike]


def _as_buckets(Y: BucketLike) -> BucketMeans:
    return Y if isinstance(Y, BucketMeans) else BucketMeans.from_means(Y)


@dataclass(frozen=True, eq=False)
class CombinatorialCertificate:
    """Witness that at most score bucket means lie sqrt(lambda_) beyond nu.

    gamma is score / k, the smallest fraction this evaluation certifies.
    """

    nu: np.ndarray
    gamma: float
    lambda_: float
    score: int
    witness_direction: np.ndarray
    far_set: Tuple[int, ...]


@dataclass(frozen=True)
class MoMConfig:
    beta: float
    eta: float = 0.0
    k_constant: float = DEFAULT_K_CONSTANT
    lambda_constant: float = DEFAULT_LAMBDA_CONSTANT
    aggregator: str = AGGREGATOR_STABILITY
    gamma: float = DEFAULT_MOM_GAMMA
    descent_max_iters: int = DEFAULT_DESCENT_MAX_ITERS
    threshold_constant: float = DEFAULT_THRESHOLD_CONSTANT

    def __post_init__(self) -> None:
        InputValidator.validate_probability(self.beta, allow_zero=False)
        InputValidator.validate_probability(self.eta)
        InputValidator.validate_float(self.k_constant, 0.0, inclusive_min=False)
        InputValidator.validate_float(self.lambda_constant, 0.0, inclusive_min=False)
        InputValidator.validate_choice(self.aggregator, AGGREGATOR_REGISTRY, "aggregator")
        InputValidator.validate_float(self.gamma, 0.0, FILTER_ETA_MAX, inclusive_min=False, inclusive_max=False)
        InputValidator.validate_integer(self.descent_max_iters, 1)

    def bucket_count(self, n: int) -> int:
        """k = ceil(C_k (ln(1/beta) + eta n))."""
        return math.ceil(round(self.k_constant * (math.log(1.0 / self.beta) + self.eta * n), 9))

    def radius(self, n: int, d: int, k: int) -> float:
        """sqrt(lambda) = C_lambda (sqrt(d/n) + sqrt(k/n))."""
        return self.lambda_constant * (math.sqrt(d / n) + math.sqrt(k / n))


@dataclass(frozen=True)
class DescentConfig:
    """Descent aggregator settings; each step moves by the median projection."""

    gamma: float
    lambda_: float
    max_iters: int = DEFAULT_DESCENT_MAX_ITERS

    def __post_init__(self) -> None:
        InputValidator.validate_float(self.gamma, 0.0, 0.5, inclusive_max=False)
        InputValidator.validate_float(self.lambda_, 0.0)
        InputValidator.validate_integer(self.max_iters, 1)


def bucket_means(X: DatasetLike, k: int, shuffle: Optional[RngStream] = None) -> BucketMeans:
    """Partition into k contiguous buckets (after an optional seeded shuffle).

    The first n mod k buckets hold one extra point.

    Raises:
        BucketCountError: If k > n
    """
    dataset = as_dataset(X)
    n = dataset.n
    k = InputValidator.validate_integer(k, 1)
    if k > n:
        raise BucketCountError(f"bucket count {k} exceeds sample count {n}")

    permutation = shuffle.generator().permutation(n) if shuffle is not None else np.arange(n)
    base, extra = divmod(n, k)
    sizes = np.full(k, base)
    sizes[:extra] += 1
    boundaries = np.concatenate([[0], np.cumsum(sizes)])
    sums = np.add.reduceat(dataset.rows[permutation], boundaries[:-1], axis=0)
    return BucketMeans(
        Y=sums / sizes[:, None],
        permutation=permutation,
        boundaries=boundaries,
        n_samples=n,
    )


def mom_univariate(xs: Sequence[float], k: int, shuffle: Optional[RngStream] = None) -> float:
    """Median of k bucket means of a univariate sample."""
    column = np.asarray(xs, dtype=np.float64).reshape(-1, 1)
    return median(bucket_means(column, k, shuffle).Y[:, 0])


def simple_median(Y: BucketLike) -> np.ndarray:
    """The bucket mean whose ceil(0.6 k)-th smallest distance to the bucket
    means (itself included) is smallest; ties go to the lowest index."""
    means = _as_buckets(Y).Y
    k = means.shape[0]
    rank = max(1, math.ceil(round(SIMPLE_MEDIAN_QUANTILE * k, 9)))
    radii = np.sort(cdist(means, means), axis=1)[:, rank - 1]
    return means[int(np.argmin(radii))].copy()


def direction_net(d: int, resolution: int = DEFAULT_NET_RESOLUTION) -> np.ndarray:
    """Deterministic unit-vector net.

    d = 1: {+1, -1}. d = 2: resolution equally spaced angles starting at e1.
    d = 3: resolution azimuths times ceil(resolution/2) + 1 polar angles, poles
    and equator included.
    """
    d = InputValidator.validate_integer(d, 1, 3)
    resolution = InputValidator.validate_integer(resolution, 4)
    if d == 1:
        return np.array([[1.0], [-1.0]])

    azimuth = 2.0 * np.pi * np.arange(resolution) / resolution
    if d == 2:
        return np.column_stack([np.cos(azimuth), np.sin(azimuth)])

    polar_steps = math.ceil(resolution / 2) + 1
    polar = np.pi * np.arange(polar_steps) / (polar_steps - 1)
    az, po = np.meshgrid(azimuth, polar, indexing="xy")
    net = np.column_stack([
        (np.sin(po) * np.cos(az)).ravel(),
        (np.sin(po) * np.sin(az)).ravel(),
        np.cos(po).ravel(),
    ])
    return net / np.linalg.norm(net, axis=1, keepdims=True)


def _directions(directions: Optional[np.ndarray], d: int) -> np.ndarray:
    if directions is None:
        if d > 3:
            return np.vstack([np.eye(d), -np.eye(d)])
        return direction_net(d)
    V = np.asarray(directions, dtype=np.float64)
    if V.ndim == 1:
        V = V.reshape(1, -1)
    if V.shape[0] == 0 or V.shape[1] != d:
        raise ValueError(f"direction set must be a non-empty m x {d} array")
    return V


def combinatorial_scores(
    Y: BucketLike,
    centers: np.ndarray,
    lambda_: float,
    directions: Optional[np.ndarray] = None,
) -> np.ndarray:
    """combinatorial_score for many centers at once (scores only).

    Bucket j counts toward direction v at center c when
    <Y_j, v> >= <c, v> + sqrt(lambda_).
    """
    means = _as_buckets(Y).Y
    k, d = means.shape
    C = np.asarray(centers, dtype=np.float64).reshape(-1, d)
    V = _directions(directions, d)
    radius = math.sqrt(InputValidator.validate_float(lambda_, 0.0))

    best = np.zeros(C.shape[0], dtype=np.int64)
    for v in V:
        projected = np.sort(means @ v)
        counts = k - np.searchsorted(projected, C @ v + radius, side="left")
        np.maximum(best, counts, out=best)
    return best


def combinatorial_score(
    Y: BucketLike,
    nu: Sequence[float],
    lambda_: float,
    directions: Optional[np.ndarray] = None,
) -> CombinatorialCertificate:
    """Max over directions v of #{j : <Y_j - nu, v> >= sqrt(lambda_)}.

    Args:
        Y: Bucket means
        nu: Candidate center
        lambda_: Squared radius (>= 0)
        directions: m x d unit vectors; default is direction_net(d) for
            d <= 3 and the signed axes above that

    Returns:
        CombinatorialCertificate with the first maximising direction
    """
    buckets = _as_buckets(Y)
    means = buckets.Y
    nu = InputValidator.validate_vector(nu, length=buckets.d, name="nu")
    V = _directions(directions, buckets.d)
    radius = math.sqrt(InputValidator.validate_float(lambda_, 0.0))

    hits = (means @ V.T) >= (V @ nu + radius)
    counts = hits.sum(axis=0)
    j = int(np.argmax(counts))
    score = int(counts[j])
    return CombinatorialCertificate(
        nu=nu,
        gamma=score / buckets.k,
        lambda_=float(lambda_),
        score=score,
        witness_direction=V[j].copy(),
        far_set=tuple(int(i) for i in np.flatnonzero(hits[:, j])),
    )


def exact_score_2d(Y: BucketLike, nu: Sequence[float], lambda_: float) -> CombinatorialCertificate:
    """Exact combinatorial score in d = 2 by sweeping arc start points.

    Bucket j counts for the directions in the closed arc
    [phi_j - alpha_j, phi_j + alpha_j] with alpha_j = arccos(sqrt(lambda)/r_j);
    the maximum overlap of closed arcs is attained at some arc start.
    """
    buckets = _as_buckets(Y)
    if buckets.d != 2:
        raise ValueError("exact_score_2d needs two-dimensional bucket means")
    nu = InputValidator.validate_vector(nu, length=2, name="nu")
    radius = math.sqrt(InputValidator.validate_float(lambda_, 0.0))

    Z = buckets.Y - nu
    r = np.linalg.norm(Z, axis=1)
    if radius == 0.0:
        everywhere = r == 0.0
    else:
        everywhere = np.zeros(buckets.k, dtype=bool)
    reachable = (r >= radius) & ~everywhere

    phi = np.arctan2(Z[reachable, 1], Z[reachable, 0])
    alpha = np.arccos(np.clip(radius / r[reachable], -1.0, 1.0))
    base = int(np.count_nonzero(everywhere))

    if phi.size == 0:
        witness = np.array([1.0, 0.0])
        far = np.flatnonzero(everywhere)
        return CombinatorialCertificate(nu, base / buckets.k, float(lambda_), base, witness, tuple(int(i) for i in far))

    starts = phi - alpha
    # circular distance from each candidate angle to each arc center
    gap = np.abs((starts[:, None] - phi[None, :] + np.pi) % (2.0 * np.pi) - np.pi)
    inside = gap <= alpha[None, :] + ARC_SLACK
    counts = inside.sum(axis=1)
    i = int(np.argmax(counts))
    theta = starts[i]

    reachable_idx = np.flatnonzero(reachable)
    far = np.sort(np.concatenate([np.flatnonzero(everywhere), reachable_idx[inside[i]]]))
    score = base + int(counts[i])
    return CombinatorialCertificate(
        nu=nu,
        gamma=score / buckets.k,
        lambda_=float(lambda_),
        score=score,
        witness_direction=np.array([math.cos(theta), math.sin(theta)]),
        far_set=tuple(int(j) for j in far),
    )


@logged_estimator("descent_center")
def descent_center(Y: BucketLike, cfg: DescentConfig, rng: Optional[RngStream] = None) -> EstimatorReport:
    """Descent on the combinatorial score.

    Starts at the coordinate-wise median. Each round scores the current
    center over the signed spectral direction (from certify_spectral_center
    with cfg.gamma) and the signed axes. A score <= gamma k returns; otherwise
    the center moves along the witness direction by the median projection of
    all bucket means. On hitting max_iters the best-scoring center is returned
    with the max_iters warning.
    """
    buckets = _as_buckets(Y)
    k, d = buckets.shape
    if k < 3:
        raise BucketCountError("descent_center needs at least three buckets")
    rng = rng or RngStream(0)
    axes = np.eye(d)
    budget = cfg.gamma * k

    nu = coordinate_wise_median(buckets.Y)
    best_nu, best_cert = nu, None
    for iteration in range(cfg.max_iters):
        spectral = certify_spectral_center(buckets.Y, nu, cfg.gamma, rng=rng.spawn(iteration))
        V = np.vstack([spectral.direction, -spectral.direction, axes, -axes])
        cert = combinatorial_score(buckets, nu, cfg.lambda_, V)
        if best_cert is None or cert.score < best_cert.score:
            best_nu, best_cert = nu, cert
        if cert.score <= budget:
            return EstimatorReport(nu, iterations=iteration, certificate=cert)

        v = cert.witness_direction
        step = median((buckets.Y - nu) @ v)
        log_debug(f"descent_center iteration {iteration}: score={cert.score}, step={step:.4g}")
        nu = nu + step * v

    return EstimatorReport(
        best_nu, iterations=cfg.max_iters, certificate=best_cert, warnings={WARN_MAX_ITERS}
    )


@logged_estimator("stability_aggregator")
def stability_aggregator(
    Y: BucketLike,
    gamma: float,
    lambda_constant: float = DEFAULT_LAMBDA_CONSTANT,
    threshold_constant: float = DEFAULT_THRESHOLD_CONSTANT,
    rng: Optional[RngStream] = None,
) -> EstimatorReport:
    """filter_mean over the bucket means with the bounded-covariance tail model.

    The identity-covariance assumption is rescaled by lambda_constant * k / n,
    the covariance of a bucket mean up to the constant.
    """
    buckets = _as_buckets(Y)
    if buckets.k < 2:
        raise BucketCountError("stability_aggregator needs at least two buckets")
    cfg = FilterConfig(
        eta=gamma,
        threshold_constant=threshold_constant,
        tail_model=TAIL_MODEL_BOUNDED_COVARIANCE,
        variance_scale=lambda_constant * buckets.k / buckets.n_samples,
    )
    return filter_mean(buckets.Y, cfg, rng or RngStream(0))


def _aggregate_simple_median(buckets, cfg, gamma, rng):
    return EstimatorReport(simple_median(buckets), iterations=1)


def _aggregate_stability(buckets, cfg, gamma, rng):
    return stability_aggregator(buckets, gamma, cfg.lambda_constant, cfg.threshold_constant, rng)


def _aggregate_descent(buckets, cfg, gamma, rng):
    radius = cfg.radius(buckets.n_samples, buckets.d, buckets.k)
    descent = DescentConfig(gamma=gamma, lambda_=radius ** 2, max_iters=cfg.descent_max_iters)
    return descent_center(buckets, descent, rng)


AGGREGATOR_REGISTRY: Dict[str, Callable[[BucketMeans, MoMConfig, float, RngStream], EstimatorReport]] = {
    AGGREGATOR_SIMPLE_MEDIAN: _aggregate_simple_median,
    AGGREGATOR_STABILITY: _aggregate_stability,
    AGGREGATOR_DESCENT: _aggregate_descent,
}

# Fewest buckets each aggregator accepts
AGGREGATOR_MIN_BUCKETS: Dict[str, int] = {
    AGGREGATOR_SIMPLE_MEDIAN: 1,
    AGGREGATOR_STABILITY: 2,
    AGGREGATOR_DESCENT: 3,
}


@logged_estimator("heavy_tailed_mean")
def heavy_tailed_mean(X: DatasetLike, cfg: MoMConfig, rng: RngStream) -> EstimatorReport:
    """Median-of-means estimator robust to heavy tails and contamination.

    Buckets a seeded shuffle of X into k = ceil(C_k (ln(1/beta) + eta n))
    buckets and aggregates them. k is raised to the aggregator's minimum
    (AGGREGATOR_MIN_BUCKETS) when the formula gives fewer. The aggregator
    runs with gamma = max(cfg.gamma, eta n / k), kept below 1/3.

    Raises:
        BucketCountError: If k > n
    """
    dataset = as_dataset(X)
    n = dataset.n
    k = max(cfg.bucket_count(n), AGGREGATOR_MIN_BUCKETS[cfg.aggregator])
    if k > n:
        raise BucketCountError("β too small or η too large for n")

    gamma = min(max(cfg.gamma, cfg.eta * n / k), 0.99 * FILTER_ETA_MAX)
    buckets = bucket_means(dataset, k, shuffle=rng.spawn(0))
    inner = AGGREGATOR_REGISTRY[cfg.aggregator](buckets, cfg, gamma, rng.spawn(1))

    return EstimatorReport(
        inner.estimate,
        iterations=inner.iterations,
        final_top_eigenvalue=inner.final_top_eigenvalue,
        warnings=inner.warnings,
        certificate=inner.certificate,
        details={"k": k, "gamma": gamma, "aggregator": cfg.aggregator, "removed_buckets": inner.removed_indices},
    )
