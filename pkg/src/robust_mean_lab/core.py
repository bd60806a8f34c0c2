# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Shared data model and linear-algebra primitives.

Components:
    - Dataset: immutable n x d float64 sample matrix
    - RngStream: (master_seed, stream_id, path) handle onto numpy's SeedSequence
    - EstimatorReport: estimate plus diagnostics returned by every estimator
    - empirical_mean(), empirical_covariance(), top_eigenpair()

Every random draw in the package goes through an explicitly passed RngStream.
Identical streams give identical bytes, so trials can be replayed one by one.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, Iterable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import DEFAULT_EIGEN_TOL, SYMMETRY_TOL
from .errors import (
    ConvergenceError,
    EmptyInputError,
    NonFiniteInputError,
    NotSymmetricError,
    ShapeMismatchError,
)
from .validation import InputValidator

SEED_LIMIT = 2 ** 64
# Ritz block width for the top-eigenpair iteration
EIGEN_BLOCK_SIZE = 8


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable n x d matrix of finite float64 samples.

    One-dimensional input is read as n samples in dimension 1.

    Raises:
        EmptyInputError: If there are no rows
        ShapeMismatchError: If rows are ragged or d == 0
        NonFiniteInputError: If any entry is NaN or infinite
    """

    rows: np.ndarray

    def __post_init__(self) -> None:
        try:
            arr = np.array(self.rows, dtype=np.float64)
        except ValueError as e:
            raise ShapeMismatchError(f"rows must have identical length: {e}") from e

        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ShapeMismatchError(f"dataset must be two-dimensional, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise EmptyInputError()
        if arr.shape[1] == 0:
            raise ShapeMismatchError("dimension must be positive")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInputError("dataset entries must be finite")

        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def d(self) -> int:
        return int(self.rows.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n, self.d)

    def __len__(self) -> int:
        return self.n

    def subset(self, indices: Iterable[int]) -> "Dataset":
        """Dataset made of the given rows, in the given order."""
        idx = np.asarray(list(indices), dtype=np.intp)
        return Dataset(self.rows[idx])

    def translate(self, c: Sequence[float]) -> "Dataset":
        """Dataset with the vector c added to every row."""
        shift = InputValidator.validate_vector(c, length=self.d, name="translation")
        return Dataset(self.rows + shift)


DatasetLike = Union[Dataset, np.ndarray, Sequence[Sequence[float]], Sequence[float]]


def as_dataset(X: DatasetLike) -> Dataset:
    """Wrap array-like input in a Dataset (no copy when it already is one)."""
    if isinstance(X, Dataset):
        return X
    return Dataset(X)


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by (master_seed, stream_id, path).

    Example:
        >>> trial = RngStream(master_seed=7, stream_id=3)
        >>> sample_gen = trial.spawn(0).generator()
    """

    master_seed: int
    stream_id: int = 0
    path: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        InputValidator.validate_integer(self.master_seed, 0, SEED_LIMIT - 1)
        InputValidator.validate_integer(self.stream_id, 0, SEED_LIMIT - 1)
        for key in self.path:
            InputValidator.validate_integer(key, 0, SEED_LIMIT - 1)
        object.__setattr__(self, "path", tuple(int(k) for k in self.path))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            entropy=int(self.master_seed), spawn_key=(int(self.stream_id),) + self.path
        )

    def generator(self) -> np.random.Generator:
        """A fresh generator; calling twice yields two identical generators."""
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def spawn(self, key: int) -> "RngStream":
        """Child stream, independent in practice of its parent and siblings."""
        return replace(self, path=self.path + (key,))


DEFAULT_STREAM = RngStream(master_seed=0, stream_id=0)


@dataclass(frozen=True, eq=False)
class EstimatorReport:
    """Estimate plus diagnostics.

    Attributes:
        estimate: d-vector with finite entries
        iterations: loop iterations performed (0 for closed-form estimators)
        removed_indices: sorted indices of rows discarded by the estimator
        final_top_eigenvalue: last top covariance eigenvalue seen, nan when unused
        warnings: soft-failure flags (see constants.bench)
        certificate: centrality evidence, if the estimator produces any
        details: estimator-specific extras (bucket count, traces, ...)
    """

    estimate: np.ndarray
    iterations: int = 0
    removed_indices: Tuple[int, ...] = ()
    final_top_eigenvalue: float = math.nan
    warnings: FrozenSet[str] = frozenset()
    certificate: Any = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        est = np.array(self.estimate, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(est)):
            raise NonFiniteInputError("estimate must have finite entries")
        est.setflags(write=False)
        object.__setattr__(self, "estimate", est)
        object.__setattr__(self, "iterations", InputValidator.validate_integer(self.iterations, 0))
        removed = tuple(sorted(int(i) for i in self.removed_indices))
        if removed and removed[0] < 0:
            raise ValueError("removed indices must be non-negative")
        object.__setattr__(self, "removed_indices", removed)
        object.__setattr__(self, "warnings", frozenset(self.warnings))

    @property
    def ok(self) -> bool:
        return not self.warnings


class Eigenpair(NamedTuple):
    value: float
    vector: np.ndarray


def empirical_mean(X: DatasetLike) -> np.ndarray:
    """Coordinate-wise average of the rows.

    Raises:
        EmptyInputError: If X has no rows
    """
    return as_dataset(X).rows.mean(axis=0)


def empirical_covariance(X: DatasetLike) -> np.ndarray:
    """Centered second-moment matrix, dividing by n."""
    rows = as_dataset(X).rows
    centered = rows - rows.mean(axis=0)
    cov = centered.T @ centered / rows.shape[0]
    return (cov + cov.T) / 2.0


def _check_symmetric(M: Any) -> np.ndarray:
    arr = np.asarray(M, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ShapeMismatchError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError("matrix entries must be finite")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.T))) > SYMMETRY_TOL * scale:
        raise NotSymmetricError("matrix is not symmetric")
    return (arr + arr.T) / 2.0


def eigen_iteration_cap(d: int, tol: float) -> int:
    return max(1, math.ceil(10 * d * math.log(max(d / tol, math.e))))


def top_eigenpair(
    M: Any,
    tol: float = DEFAULT_EIGEN_TOL,
    rng: Optional[RngStream] = None,
    max_iters: Optional[int] = None,
) -> Eigenpair:
    """Top eigenvalue and unit eigenvector of a symmetric matrix.

    Block power iteration from a random start drawn from rng, with a
    Rayleigh-Ritz step on the block each round. The block is shifted by a
    Gershgorin bound so indefinite matrices converge to the largest (not the
    largest-magnitude) eigenvalue.

    Args:
        M: Symmetric d x d matrix with finite entries
        tol: Residual tolerance; on return ||Mv - lambda v|| <= tol * max(1, lambda)
        rng: Stream for the starting block (a fixed default stream when None)
        max_iters: Iteration cap, default ceil(10 d log(d / tol))

    Returns:
        Eigenpair(value, vector)

    Raises:
        NotSymmetricError: If M is not symmetric
        ConvergenceError: If the cap is reached; carries the best iterate
    """
    A = _check_symmetric(M)
    tol = InputValidator.validate_float(tol, 0.0, inclusive_min=False)
    d = A.shape[0]

    if d == 1:
        return Eigenpair(float(A[0, 0]), np.ones(1))

    cap = max_iters if max_iters is not None else eigen_iteration_cap(d, tol)
    off_diag = np.sum(np.abs(A), axis=1) - np.abs(np.diag(A))
    shift = max(0.0, -float(np.min(np.diag(A) - off_diag)))

    gen = (rng or DEFAULT_STREAM).generator()
    block = min(d, EIGEN_BLOCK_SIZE)
    Q, _ = np.linalg.qr(gen.standard_normal((d, block)))

    best_value, best_vector, best_residual = -math.inf, Q[:, 0].copy(), math.inf
    for _ in range(cap):
        Z = A @ Q
        H = Q.T @ Z
        _, S = np.linalg.eigh((H + H.T) / 2.0)
        v = Q @ S[:, -1]
        v /= np.linalg.norm(v)

        Mv = A @ v
        value = float(v @ Mv)
        residual = float(np.linalg.norm(Mv - value * v))
        if residual < best_residual:
            best_value, best_vector, best_residual = value, v, residual
        if residual <= tol * max(1.0, value):
            return Eigenpair(value, v)

        Q, _ = np.linalg.qr(Z + shift * Q)

    raise ConvergenceError(
        f"top_eigenpair did not converge in {cap} iterations (residual {best_residual:.3e})",
        best_value=best_value,
        best_vector=best_vector,
        iterations=cap,
    )
