# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Exception hierarchy for robust_mean_lab.

Every error raised on purpose by the package derives from RobustMeanLabError,
which itself derives from ValueError so callers can keep catching
``(TypeError, ValueError)`` around parameter handling.
"""

from typing import Optional

import numpy as np


class RobustMeanLabError(ValueError):
    """Base class for all package errors."""


class EmptyInputError(RobustMeanLabError):
    """Raised when an operation receives no samples."""

    def __init__(self, message: str = "empty input"):
        super().__init__(message)


class NonFiniteInputError(RobustMeanLabError):
    """Raised when a dataset or matrix contains NaN or infinite entries."""


class ShapeMismatchError(RobustMeanLabError):
    """Raised when array shapes disagree (ragged rows, wrong vector length)."""


class NotSymmetricError(RobustMeanLabError):
    """Raised by top_eigenpair for non-symmetric input."""


class ConvergenceError(RobustMeanLabError):
    """Raised when an iterative solver hits its iteration cap.

    The best iterate seen so far is attached so callers can degrade
    gracefully instead of discarding the work.
    """

    def __init__(
        self,
        message: str,
        best_value: float,
        best_vector: Optional[np.ndarray],
        iterations: int,
    ):
        super().__init__(message)
        self.best_value = best_value
        self.best_vector = best_vector
        self.iterations = iterations


class OracleScaleError(RobustMeanLabError):
    """Raised when a brute-force oracle is asked to enumerate too much."""

    def __init__(self, message: str = "oracle scale exceeded"):
        super().__init__(message)


class InfiniteVarianceError(RobustMeanLabError):
    """Raised for Student-t specs with dof <= 2."""

    def __init__(self, message: str = "infinite variance"):
        super().__init__(message)


class FilterExhaustedError(RobustMeanLabError):
    """Raised when the filter removes every point."""

    def __init__(self, message: str = "filter exhausted dataset"):
        super().__init__(message)


class BucketCountError(RobustMeanLabError):
    """Raised when the requested or derived bucket count exceeds n."""


class CoverTooLargeError(RobustMeanLabError):
    """Raised when a cover is requested in more than three dimensions."""

    def __init__(self, message: str = "cover is exponential in d"):
        super().__init__(message)


class InfinitePrivacyLossError(RobustMeanLabError):
    """Raised by the auditor when one distribution has zero mass where the other does not."""

    def __init__(self, message: str = "infinite privacy loss"):
        super().__init__(message)


class DatasetFormatError(RobustMeanLabError):
    """Raised for malformed CSV or RMD1 dataset files."""


class ConfigError(RobustMeanLabError):
    """Raised for invalid experiment or package configuration."""


class AllTrialsFailedError(RobustMeanLabError):
    """Raised when every Monte Carlo trial of an experiment failed."""
