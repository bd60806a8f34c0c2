# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Seeded samplers and the strong-contamination adversary suite.

Architecture:
    - DistributionSpec / sample(): clean i.i.d. draws (gaussian, student_t)
    - AttackSpec / contaminate(): replace ceil(eta * n) rows
    - AttackStrategy: abstract base class, one subclass per attack kind
    - ATTACK_REGISTRY: attack kind -> strategy class

Usage:
    clean = sample(DistributionSpec("gaussian", d=8), n=400, rng=stream.spawn(0))
    result = contaminate(clean, AttackSpec("mean_shift", eta=0.1, magnitude=100.0), stream.spawn(1))
    dirty, corrupted = result.dataset, result.corrupted
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Sequence, Tuple, Type

import numpy as np

from .core import Dataset, DatasetLike, RngStream, as_dataset, empirical_mean
from .errors import InfiniteVarianceError
from .utils import log_debug
from .validation import InputValidator

DISTRIBUTION_GAUSSIAN = "gaussian"
DISTRIBUTION_STUDENT_T = "student_t"
DISTRIBUTION_KINDS = (DISTRIBUTION_GAUSSIAN, DISTRIBUTION_STUDENT_T)

ATTACK_NONE = "none"
ATTACK_MEAN_SHIFT = "mean_shift"
ATTACK_SPIKE = "spike_first_coordinate"
ATTACK_VARIANCE_INFLATION = "variance_inflation"
ATTACK_SUBTRACTIVE_TAIL = "subtractive_tail"


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    """Clean sampling distribution.

    mean defaults to the origin and covariance_diag to all ones. student_t
    draws each coordinate independently and rescales it to unit variance
    before applying covariance_diag.
    """

    kind: str
    d: int
    mean: Optional[Sequence[float]] = None
    covariance_diag: Optional[Sequence[float]] = None
    dof: Optional[float] = None

    def __post_init__(self) -> None:
        InputValidator.validate_choice(self.kind, DISTRIBUTION_KINDS, "distribution")
        d = InputValidator.validate_integer(self.d, 1)
        mean = (
            np.zeros(d) if self.mean is None
            else InputValidator.validate_vector(self.mean, length=d, name="mean")
        )
        diag = (
            np.ones(d) if self.covariance_diag is None
            else InputValidator.validate_vector(self.covariance_diag, length=d, name="covariance_diag")
        )
        if np.any(diag < 0):
            raise ValueError("covariance_diag entries must be non-negative")

        if self.kind == DISTRIBUTION_STUDENT_T:
            if self.dof is None:
                raise ValueError("student_t requires dof")
            dof = InputValidator.validate_float(self.dof)
            if dof <= 2:
                raise InfiniteVarianceError()
            object.__setattr__(self, "dof", dof)

        mean.setflags(write=False)
        diag.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance_diag", diag)


def sample(spec: DistributionSpec, n: int, rng: RngStream) -> Dataset:
    """Draw n i.i.d. samples; bit-identical for identical rng.

    Raises:
        InfiniteVarianceError: For student_t with dof <= 2
    """
    n = InputValidator.validate_integer(n, 1)
    if spec.kind == DISTRIBUTION_STUDENT_T and (spec.dof is None or spec.dof <= 2):
        raise InfiniteVarianceError()

    gen = rng.generator()
    if spec.kind == DISTRIBUTION_GAUSSIAN:
        noise = gen.standard_normal((n, spec.d))
    else:
        noise = gen.standard_t(spec.dof, size=(n, spec.d)) * math.sqrt((spec.dof - 2.0) / spec.dof)

    return Dataset(spec.mean + noise * np.sqrt(spec.covariance_diag))


@dataclass(frozen=True, eq=False)
class AttackSpec:
    """Adversary kind, corruption fraction eta, magnitude D and direction.

    direction defaults to e1 and is resolved against the dataset dimension
    at attack time.
    """

    kind: str = ATTACK_NONE
    eta: float = 0.0
    magnitude: float = 0.0
    direction: Optional[Sequence[float]] = None

    def __post_init__(self) -> None:
        InputValidator.validate_choice(self.kind, tuple(ATTACK_REGISTRY) + (ATTACK_NONE,), "attack")
        object.__setattr__(self, "eta", InputValidator.validate_probability(self.eta))
        object.__setattr__(self, "magnitude", InputValidator.validate_float(self.magnitude, 0.0))
        if self.direction is not None:
            direction = InputValidator.validate_unit_vector(self.direction)
            direction.setflags(write=False)
            object.__setattr__(self, "direction", direction)

    def corruption_count(self, n: int) -> int:
        """m = ceil(eta * n); the none attack corrupts nothing."""
        if self.kind == ATTACK_NONE:
            return 0
        return math.ceil(round(self.eta * n, 9))

    def resolved_direction(self, d: int) -> np.ndarray:
        if self.direction is None:
            e1 = np.zeros(d)
            e1[0] = 1.0
            return e1
        return InputValidator.validate_vector(self.direction, length=d, name="direction")


class ContaminationResult(NamedTuple):
    dataset: Dataset
    corrupted: Tuple[int, ...]


class AttackStrategy(ABC):
    """Abstract base class for adversaries.

    Subclasses pick which rows to replace and what to replace them with.
    mu_hat is always the pre-attack empirical mean.
    """

    @abstractmethod
    def select(self, rows: np.ndarray, m: int, direction: np.ndarray, gen: np.random.Generator) -> np.ndarray:
        """Return m distinct row indices to replace."""

    @abstractmethod
    def replacement(self, m: int, mu_hat: np.ndarray, magnitude: float, direction: np.ndarray) -> np.ndarray:
        """Return the m replacement rows, aligned with select()'s order."""


class RandomSubsetAttack(AttackStrategy):
    """Replaces a uniformly random subset of rows."""

    def select(self, rows, m, direction, gen):
        return gen.choice(rows.shape[0], size=m, replace=False)


class MeanShiftAttack(RandomSubsetAttack):
    def replacement(self, m, mu_hat, magnitude, direction):
        return np.tile(mu_hat + magnitude * direction, (m, 1))


class SpikeFirstCoordinateAttack(RandomSubsetAttack):
    """Places every corrupted row at mu_hat + D e1, ignoring direction."""

    def replacement(self, m, mu_hat, magnitude, direction):
        spike = mu_hat.copy()
        spike[0] += magnitude
        return np.tile(spike, (m, 1))


class VarianceInflationAttack(RandomSubsetAttack):
    """ceil(m/2) rows at mu_hat + D v, the rest at mu_hat - D v."""

    def replacement(self, m, mu_hat, magnitude, direction):
        plus = (m + 1) // 2
        signs = np.where(np.arange(m) < plus, 1.0, -1.0)
        return mu_hat + magnitude * signs[:, None] * direction


class SubtractiveTailAttack(AttackStrategy):
    """Replaces the m rows with the largest projection on direction by mu_hat."""

    def select(self, rows, m, direction, gen):
        return np.argsort(-(rows @ direction), kind="stable")[:m]

    def replacement(self, m, mu_hat, magnitude, direction):
        return np.tile(mu_hat, (m, 1))


ATTACK_REGISTRY: Dict[str, Type[AttackStrategy]] = {
    ATTACK_MEAN_SHIFT: MeanShiftAttack,
    ATTACK_SPIKE: SpikeFirstCoordinateAttack,
    ATTACK_VARIANCE_INFLATION: VarianceInflationAttack,
    ATTACK_SUBTRACTIVE_TAIL: SubtractiveTailAttack,
}


def contaminate(X: DatasetLike, attack: AttackSpec, rng: RngStream) -> ContaminationResult:
    """Apply a strong-contamination attack.

    Exactly ceil(eta * n) rows are replaced; every other row is left
    bit-identical.

    Raises:
        ValueError: If ceil(eta * n) exceeds n
    """
    X = as_dataset(X)
    m = attack.corruption_count(X.n)
    if m > X.n:
        raise ValueError(f"attack corrupts {m} rows but dataset has {X.n}")
    if m == 0:
        return ContaminationResult(X, ())

    direction = attack.resolved_direction(X.d)
    strategy = ATTACK_REGISTRY[attack.kind]()
    mu_hat = empirical_mean(X)

    idx = np.asarray(strategy.select(X.rows, m, direction, rng.generator()), dtype=np.intp)
    rows = X.rows.copy()
    rows[idx] = strategy.replacement(m, mu_hat, attack.magnitude, direction)

    log_debug(f"contaminate kind={attack.kind} m={m} n={X.n}")
    return ContaminationResult(Dataset(rows), tuple(sorted(int(i) for i in idx)))
