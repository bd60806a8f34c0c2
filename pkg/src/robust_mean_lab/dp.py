# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Differentially private mean estimation.

Components:
    - clip(), choose_tau(), clipped_mean(): Laplace / Gaussian clipped means
    - exponential_mechanism(): sampling over a finite scored candidate set
    - build_cover(), private_mom_mean(): the cover-based private
      median-of-means estimator (d <= 3)
    - inverse_sensitivity_median(): private univariate median
    - audit_mechanism(), export_audit_csv(): exact privacy-loss audits of
      finite mechanisms

Neighbouring datasets differ by replacing one row. Every random draw comes
from an explicit RngStream; probability vectors are returned alongside the
samples so they can be audited exactly.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.special import softmax

from .constants import (
    CLIP_SENSITIVITY_FACTOR,
    COVER_MAX_DIMENSION,
    DEFAULT_NET_RESOLUTION,
    DEFAULT_PRIVATE_MOM_C1,
    DEFAULT_PRIVATE_MOM_C2,
    GAUSSIAN_MECHANISM_DELTA_NUMERATOR,
    NORMALIZATION_TOL,
)
from .core import DatasetLike, EstimatorReport, RngStream, as_dataset
from .errors import BucketCountError, CoverTooLargeError, InfinitePrivacyLossError
from .mom import bucket_means, combinatorial_scores, direction_net
from .utils import log_debug, logged_estimator
from .validation import InputValidator


@dataclass(frozen=True)
class PrivacyBudget:
    """(epsilon, delta); delta = 0 is pure DP."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        InputValidator.validate_float(self.epsilon, 0.0, inclusive_min=False)
        InputValidator.validate_probability(self.delta)

    @property
    def pure(self) -> bool:
        return self.delta == 0.0


@dataclass(frozen=True)
class ClipConfig:
    """Clip radius tau with the matching replace-one sensitivities."""

    tau: float
    l1_sensitivity: float
    l2_sensitivity: float

    @classmethod
    def for_dataset(cls, tau: float, n: int, d: int) -> "ClipConfig":
        """Delta_1 = 2 tau sqrt(d) / n and Delta_2 = 2 tau / n."""
        tau = InputValidator.validate_float(tau, 0.0, inclusive_min=False)
        n = InputValidator.validate_integer(n, 1)
        d = InputValidator.validate_integer(d, 1)
        return cls(
            tau=tau,
            l1_sensitivity=CLIP_SENSITIVITY_FACTOR * tau * math.sqrt(d) / n,
            l2_sensitivity=CLIP_SENSITIVITY_FACTOR * tau / n,
        )

    def matches(self, n: int, d: int) -> bool:
        expected = ClipConfig.for_dataset(self.tau, n, d)
        return math.isclose(self.l1_sensitivity, expected.l1_sensitivity) and math.isclose(
            self.l2_sensitivity, expected.l2_sensitivity
        )


@dataclass(frozen=True, eq=False)
class ScoredCandidateSet:
    """Finite candidate set with scores of per-candidate sensitivity Delta."""

    candidates: np.ndarray
    scores: np.ndarray
    sensitivity: float = 1.0

    def __post_init__(self) -> None:
        candidates = np.asarray(self.candidates, dtype=np.float64)
        scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        if candidates.shape[0] == 0:
            raise ValueError("candidate set is empty")
        if candidates.shape[0] != scores.shape[0]:
            raise ValueError(f"{candidates.shape[0]} candidates but {scores.shape[0]} scores")
        InputValidator.validate_float(self.sensitivity, 0.0, inclusive_min=False)
        object.__setattr__(self, "candidates", candidates)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return int(self.scores.shape[0])


@dataclass(frozen=True, eq=False)
class Cover:
    """Axis-aligned grid points of step spacing inside the ball of the given radius."""

    points: np.ndarray
    radius: float
    spacing: float

    def __len__(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True)
class PrivateMoMConfig:
    c1: float = DEFAULT_PRIVATE_MOM_C1
    c2: float = DEFAULT_PRIVATE_MOM_C2
    net_resolution: int = DEFAULT_NET_RESOLUTION


class MechanismResult(NamedTuple):
    chosen: Any
    probabilities: np.ndarray
    index: int


def clip(x: Sequence[float], tau: float) -> np.ndarray:
    """Project x onto the l2 ball of radius tau by rescaling."""
    tau = InputValidator.validate_float(tau, 0.0, inclusive_min=False)
    x = InputValidator.validate_vector(x, name="x")
    norm = float(np.linalg.norm(x))
    return x.copy() if norm <= tau else tau * x / norm


def clip_rows(rows: np.ndarray, tau: float) -> np.ndarray:
    """clip() applied to every row; rows already inside the ball are untouched."""
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    inside = norms <= tau
    return np.where(inside, rows, tau * rows / np.where(inside, 1.0, norms))


def choose_tau(n: int, d: int, budget: PrivacyBudget) -> float:
    """Clip radius balancing clipping bias sqrt(d)/tau against the noise.

    Pure budgets use l1 noise tau d / (n eps), giving sqrt(n eps) / d^(1/4);
    approximate budgets use l2 noise tau sqrt(d ln(1/delta)) / (n eps),
    giving sqrt(n eps) / ln(1/delta)^(1/4).
    """
    n = InputValidator.validate_integer(n, 1)
    d = InputValidator.validate_integer(d, 1)
    scale = math.sqrt(n * budget.epsilon)
    if budget.pure:
        return scale / d ** 0.25
    return scale / math.log(1.0 / budget.delta) ** 0.25


def predicted_clipped_error(tau: float, n: int, d: int, budget: PrivacyBudget) -> float:
    """Clipping bias plus noise magnitude; choose_tau() minimises it over tau."""
    bias = math.sqrt(d) / tau
    if budget.pure:
        noise = tau * d / (n * budget.epsilon)
    else:
        noise = tau * math.sqrt(d * math.log(1.0 / budget.delta)) / (n * budget.epsilon)
    return bias + noise


def gaussian_noise_scale(l2_sensitivity: float, budget: PrivacyBudget) -> float:
    """sigma = Delta_2 sqrt(2 ln(1.25/delta)) / eps."""
    return l2_sensitivity * math.sqrt(2.0 * math.log(GAUSSIAN_MECHANISM_DELTA_NUMERATOR / budget.delta)) / budget.epsilon


@logged_estimator("clipped_mean")
def clipped_mean(X: DatasetLike, cfg: ClipConfig, budget: PrivacyBudget, rng: RngStream) -> EstimatorReport:
    """Mean of the clipped rows plus Laplace (pure) or Gaussian (approximate) noise.

    Raises:
        ValueError: If cfg's sensitivities do not match X's n and d
    """
    dataset = as_dataset(X)
    if not cfg.matches(dataset.n, dataset.d):
        raise ValueError("clip config sensitivities do not match the dataset shape")

    value = clip_rows(dataset.rows, cfg.tau).mean(axis=0)
    gen = rng.generator()
    if budget.pure:
        scale = cfg.l1_sensitivity / budget.epsilon
        noise = gen.laplace(0.0, scale, size=dataset.d)
    else:
        scale = gaussian_noise_scale(cfg.l2_sensitivity, budget)
        noise = gen.normal(0.0, scale, size=dataset.d)

    return EstimatorReport(
        value + noise,
        iterations=1,
        details={"pre_noise": value, "noise_scale": scale, "tau": cfg.tau},
    )


def exponential_mechanism_probabilities(scores: Sequence[float], epsilon: float, sensitivity: float = 1.0) -> np.ndarray:
    """P(h) proportional to exp(eps s(h) / (2 Delta)), computed with a max shift."""
    epsilon = InputValidator.validate_float(epsilon, 0.0, inclusive_min=False)
    s = np.asarray(scores, dtype=np.float64)
    return softmax(epsilon * s / (2.0 * sensitivity))


def exponential_mechanism(S: ScoredCandidateSet, epsilon: float, rng: RngStream) -> MechanismResult:
    """Sample a candidate from the exponential mechanism.

    Example:
        >>> S = ScoredCandidateSet(np.array([0.0, 1.0]), np.array([0.0, -1.0]))
        >>> float(exponential_mechanism(S, 2.0, RngStream(1)).probabilities[0])
        0.7310585786300049
    """
    probabilities = exponential_mechanism_probabilities(S.scores, epsilon, S.sensitivity)
    index = int(rng.generator().choice(len(S), p=probabilities))
    return MechanismResult(S.candidates[index], probabilities, index)


def exponential_mechanism_utility_bound(
    epsilon: float, sensitivity: float, n_candidates: int, beta: float
) -> float:
    """With probability >= 1 - beta the chosen score is within this of the maximum."""
    beta = InputValidator.validate_probability(beta, allow_zero=False)
    return 2.0 * sensitivity * (math.log(n_candidates) + math.log(1.0 / beta)) / epsilon


def build_cover(d: int, radius: float, spacing: float) -> Cover:
    """Grid of step spacing centred at the origin, intersected with the closed
    l2 ball of the given radius.

    Raises:
        CoverTooLargeError: If d > 3
    """
    d = InputValidator.validate_integer(d, 1)
    if d > COVER_MAX_DIMENSION:
        raise CoverTooLargeError()
    radius = InputValidator.validate_float(radius, 0.0)
    spacing = InputValidator.validate_float(spacing, 0.0, inclusive_min=False)

    m = int(math.floor(radius / spacing + 1e-9))
    axis = np.arange(-m, m + 1) * spacing
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    points = grid[np.linalg.norm(grid, axis=1) <= radius]
    return Cover(points=points, radius=radius, spacing=spacing)


def _private_mom_parameters(n: int, d: int, budget: PrivacyBudget, cfg: PrivateMoMConfig):
    eps = budget.epsilon
    log_n = math.log(n)
    k = max(1, math.ceil(round(cfg.c1 * d * log_n / eps, 9)))
    spacing = cfg.c2 * math.sqrt(d / (eps * n))
    lambda_ = cfg.c2 ** 2 * d * log_n / (eps * n)
    return k, spacing, lambda_


def private_mom_candidates(
    X: DatasetLike, budget: PrivacyBudget, cfg: Optional[PrivateMoMConfig] = None
) -> ScoredCandidateSet:
    """Scored cover used by private_mom_mean.

    Candidates are the cover points of radius sqrt(d); the score of nu is the
    negated combinatorial score of the contiguous bucket means over a fixed
    direction net. One replaced row moves one bucket mean, so scores have
    sensitivity 1.

    Raises:
        ValueError: For an approximate budget
        CoverTooLargeError: If d > 3
        BucketCountError: If the derived k exceeds n
    """
    cfg = cfg or PrivateMoMConfig()
    dataset = as_dataset(X)
    if not budget.pure:
        raise ValueError("private_mom_mean requires a pure budget (delta = 0)")
    if dataset.d > COVER_MAX_DIMENSION:
        raise CoverTooLargeError()

    k, spacing, lambda_ = _private_mom_parameters(dataset.n, dataset.d, budget, cfg)
    if k > dataset.n:
        raise BucketCountError(f"bucket count {k} exceeds sample count {dataset.n}")

    cover = build_cover(dataset.d, math.sqrt(dataset.d), spacing)
    buckets = bucket_means(dataset, k)
    net = direction_net(dataset.d, cfg.net_resolution)
    scores = -combinatorial_scores(buckets, cover.points, lambda_, net)
    log_debug(f"private_mom_candidates k={k} cover={len(cover)} lambda={lambda_:.4g}")
    return ScoredCandidateSet(cover.points, scores, sensitivity=1.0)


@logged_estimator("private_mom_mean")
def private_mom_mean(
    X: DatasetLike,
    budget: PrivacyBudget,
    cfg: Optional[PrivateMoMConfig] = None,
    rng: Optional[RngStream] = None,
) -> EstimatorReport:
    """Pure-DP median-of-means estimate via the exponential mechanism over a cover."""
    cfg = cfg or PrivateMoMConfig()
    dataset = as_dataset(X)
    S = private_mom_candidates(dataset, budget, cfg)
    result = exponential_mechanism(S, budget.epsilon, rng or RngStream(0))
    k, spacing, lambda_ = _private_mom_parameters(dataset.n, dataset.d, budget, cfg)
    return EstimatorReport(
        result.chosen,
        iterations=1,
        details={
            "k": k,
            "spacing": spacing,
            "lambda": lambda_,
            "cover_size": len(S),
            "score": float(S.scores[result.index]),
        },
    )


def inverse_sensitivity_scores(xs: Sequence[float], grid: Sequence[float]) -> np.ndarray:
    """Negated number of order statistics that must change to make each grid
    point the median.

    The score of h is -min{m >= 0 : x_(lo-m) <= h <= x_(hi+m)}, with
    out-of-range order statistics read as -inf / +inf.
    """
    s = np.sort(np.asarray(xs, dtype=np.float64).reshape(-1))
    if s.size == 0:
        raise ValueError("xs is empty")
    h = np.asarray(grid, dtype=np.float64).reshape(-1)
    if h.size == 0:
        raise ValueError("output grid is empty")

    n = s.size
    lo, hi = (n + 1) // 2 - 1, (n + 2) // 2 - 1
    at_most = np.searchsorted(s, h, side="right")
    below = np.searchsorted(s, h, side="left")
    m = np.maximum.reduce([np.zeros_like(h, dtype=np.int64), lo - at_most + 1, below - hi])
    return -m


def inverse_sensitivity_median(
    xs: Sequence[float],
    budget: PrivacyBudget,
    output_grid: Sequence[float],
    rng: RngStream,
) -> float:
    """Pure-DP median: exponential mechanism over output_grid with inverse-sensitivity scores."""
    if not budget.pure:
        raise ValueError("inverse_sensitivity_median requires a pure budget (delta = 0)")
    grid = np.asarray(output_grid, dtype=np.float64).reshape(-1)
    S = ScoredCandidateSet(grid, inverse_sensitivity_scores(xs, grid), sensitivity=1.0)
    return float(exponential_mechanism(S, budget.epsilon, rng).chosen)


def _check_distribution(p: np.ndarray, name: str) -> None:
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty probability vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(float(p.sum()) - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"{name} sums to {float(p.sum())!r}, not 1")


def log_ratios(p: Sequence[float], q: Sequence[float]) -> np.ndarray:
    """Per-candidate ln(p_i / q_i), 0 where both vanish, +-inf where one does."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(divide="ignore"):
        ratios = np.log(p) - np.log(q)
    ratios[(p == 0) & (q == 0)] = 0.0
    return ratios


def audit_mechanism(p: Sequence[float], q: Sequence[float]) -> float:
    """Exact pure-DP privacy loss max_i |ln(p_i / q_i)| of two output distributions.

    Raises:
        ValueError: If p and q are not normalised distributions of equal length
        InfinitePrivacyLossError: If exactly one of p_i, q_i is zero
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    _check_distribution(p, "p")
    _check_distribution(q, "q")
    if p.shape != q.shape:
        raise ValueError("p and q must cover the same candidate set")

    ratios = log_ratios(p, q)
    if not np.all(np.isfinite(ratios)):
        raise InfinitePrivacyLossError()
    return float(np.max(np.abs(ratios)))


def _render_candidate(candidate: Any) -> str:
    values = np.atleast_1d(np.asarray(candidate, dtype=np.float64))
    return ";".join(repr(float(v)) for v in values)


def export_audit_csv(
    path: Union[str, Path],
    candidates: Sequence[Any],
    p: Sequence[float],
    q: Sequence[float],
) -> Path:
    """Write an audit record with columns candidate, p, q, log_ratio."""
    path = Path(path)
    ratios = log_ratios(p, q)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["candidate", "p", "q", "log_ratio"])
        for candidate, pi, qi, r in zip(candidates, p, q, ratios):
            writer.writerow([_render_candidate(candidate), repr(float(pi)), repr(float(qi)), repr(float(r))])
    return path
