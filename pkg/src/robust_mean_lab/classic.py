# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Classical location estimators: univariate median, coordinate-wise median,
geometric median (Weiszfeld), approximate Tukey depth and a pruned mean.

These are the baselines the robust estimators are measured against; the
geometric median in particular pays a sqrt(d) contamination cost.
"""

from typing import Sequence

import numpy as np

from .constants import (
    COINCIDENCE_TOL,
    DEFAULT_GEOMETRIC_MEDIAN_MAX_ITERS,
    DEFAULT_GEOMETRIC_MEDIAN_TOL,
    DEFAULT_PRUNE_RADIUS_FACTOR,
    DEFAULT_TUKEY_DIRECTIONS,
    WARN_MAX_ITERS,
    WARN_NOT_CONVERGED,
)
from .core import DatasetLike, EstimatorReport, RngStream, as_dataset
from .errors import EmptyInputError
from .utils import log_debug, logged_estimator
from .validation import InputValidator


def _middle_ranks(n: int):
    # 0-based positions of the order statistics at ranks floor((n+1)/2) and ceil((n+1)/2)
    return (n + 1) // 2 - 1, (n + 2) // 2 - 1


def median(xs: Sequence[float]) -> float:
    """Median with the midpoint convention for even n.

    Example:
        >>> median([0, 0, 0, 100])
        0.0

    Raises:
        EmptyInputError: If xs is empty
    """
    arr = np.asarray(xs, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise EmptyInputError()
    s = np.sort(arr)
    lo, hi = _middle_ranks(arr.size)
    return float(0.5 * (s[lo] + s[hi]))


def coordinate_wise_median(X: DatasetLike) -> np.ndarray:
    """Per-coordinate median of the rows."""
    rows = as_dataset(X).rows
    s = np.sort(rows, axis=0)
    lo, hi = _middle_ranks(rows.shape[0])
    return 0.5 * (s[lo] + s[hi])


def _mean_distance(rows: np.ndarray, x: np.ndarray) -> float:
    return float(np.mean(np.linalg.norm(rows - x, axis=1)))


@logged_estimator("geometric_median")
def geometric_median(
    X: DatasetLike,
    tol: float = DEFAULT_GEOMETRIC_MEDIAN_TOL,
    max_iters: int = DEFAULT_GEOMETRIC_MEDIAN_MAX_ITERS,
) -> EstimatorReport:
    """Weiszfeld iteration for the point minimising the sum of l2 distances.

    Starts from the coordinate-wise median and stops once the mean-distance
    gradient has norm <= tol, which bounds the objective gap by tol times the
    dataset diameter. An iterate that lands on a data point is kept when the
    subgradient condition holds there; otherwise it is moved by tol along the
    descent direction. Only improving steps are accepted, so the objective
    trace in ``details["objective_trace"]`` is non-increasing.

    Args:
        X: Samples
        tol: Gradient tolerance (> 0)
        max_iters: Iteration cap; hitting it sets the max_iters warning

    Returns:
        EstimatorReport with the best iterate
    """
    rows = as_dataset(X).rows
    tol = InputValidator.validate_float(tol, 0.0, inclusive_min=False)
    max_iters = InputValidator.validate_integer(max_iters, 1)
    n = rows.shape[0]

    x = coordinate_wise_median(rows)
    objective = _mean_distance(rows, x)
    trace = [objective]
    warnings = set()

    for iteration in range(1, max_iters + 1):
        diff = rows - x
        dist = np.linalg.norm(diff, axis=1)
        coincident = dist <= COINCIDENCE_TOL
        far = ~coincident
        # sum of unit vectors from x toward the non-coincident points
        pull = np.sum(diff[far] / dist[far, None], axis=0) if np.any(far) else np.zeros_like(x)
        pull_norm = float(np.linalg.norm(pull))
        multiplicity = int(np.count_nonzero(coincident))

        if multiplicity:
            if pull_norm <= multiplicity:
                return EstimatorReport(x, iterations=iteration - 1, details={"objective_trace": trace})
            candidate = x + tol * pull / pull_norm
        else:
            if pull_norm / n <= tol:
                return EstimatorReport(x, iterations=iteration - 1, details={"objective_trace": trace})
            w = 1.0 / dist
            candidate = (w @ rows) / w.sum()

        candidate_objective = _mean_distance(rows, candidate)
        if candidate_objective > objective:
            # no further progress is representable while the gradient is still above tol
            warnings.add(WARN_NOT_CONVERGED)
            log_debug(f"geometric_median stalled at iteration {iteration}")
            return EstimatorReport(
                x, iterations=iteration - 1, warnings=warnings, details={"objective_trace": trace}
            )

        x, objective = candidate, candidate_objective
        trace.append(objective)

    warnings.add(WARN_MAX_ITERS)
    return EstimatorReport(x, iterations=max_iters, warnings=warnings, details={"objective_trace": trace})


def tukey_directions(d: int, n_directions: int, rng: RngStream) -> np.ndarray:
    """Direction set for depth queries.

    Exactly {+1, -1} in d = 1. Otherwise the 2d signed axes followed by
    n_directions random unit vectors; a longer request extends a shorter one
    drawn from the same stream.
    """
    if d == 1:
        return np.array([[1.0], [-1.0]])
    eye = np.eye(d)
    random = rng.generator().standard_normal((n_directions, d))
    random /= np.linalg.norm(random, axis=1, keepdims=True)
    return np.vstack([eye, -eye, random])


def tukey_depth(
    X: DatasetLike,
    theta: Sequence[float],
    n_directions: int = DEFAULT_TUKEY_DIRECTIONS,
    rng: RngStream = RngStream(0),
) -> float:
    """Approximate halfspace depth of theta.

    The minimum over the direction set of the fraction of points whose
    projection is <= theta's. Exact in d = 1; an upper bound on the true
    depth otherwise.
    """
    dataset = as_dataset(X)
    theta = InputValidator.validate_vector(theta, length=dataset.d, name="theta")
    n_directions = InputValidator.validate_integer(n_directions, 1)

    V = tukey_directions(dataset.d, n_directions, rng)
    below = (dataset.rows @ V.T) <= (V @ theta)
    return float(np.min(np.mean(below, axis=0)))


@logged_estimator("pruned_mean")
def pruned_mean(X: DatasetLike, radius_factor: float = DEFAULT_PRUNE_RADIUS_FACTOR) -> EstimatorReport:
    """Mean of the points within radius_factor times the median distance
    of the coordinate-wise median."""
    rows = as_dataset(X).rows
    radius_factor = InputValidator.validate_float(radius_factor, 0.0, inclusive_min=False)

    center = coordinate_wise_median(rows)
    dist = np.linalg.norm(rows - center, axis=1)
    radius = radius_factor * median(dist)
    keep = dist <= radius
    removed = np.flatnonzero(~keep)

    return EstimatorReport(
        rows[keep].mean(axis=0),
        iterations=1,
        removed_indices=tuple(removed),
        details={"radius": float(radius), "kept": int(np.count_nonzero(keep))},
    )


__all__ = [
    "median",
    "coordinate_wise_median",
    "geometric_median",
    "tukey_directions",
    "tukey_depth",
    "pruned_mean",
]
