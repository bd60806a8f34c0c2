# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Input validation for estimator parameters, configs and log messages.

Components:
    - InputValidator: Validates scalar parameters, choices, vectors and directions
    - sanitize_for_logging(): Summarises arrays and truncates long messages
    - config_fingerprint(): SHA-256 of a canonical config, stamped on bench summaries

Usage:
    >>> from .validation import InputValidator
    >>>
    >>> eta = InputValidator.validate_float(eta, min_val=0.0, max_val=1.0, inclusive_max=False)
    >>> k = InputValidator.validate_integer(k, min_val=1, max_val=n)

All validators raise TypeError for values of the wrong type and ValueError for
values out of range, so callers can handle both with ``except (TypeError, ValueError)``.
"""

import hashlib
import math
from typing import Any, Iterable, Optional

import numpy as np

from .constants import UNIT_NORM_TOL

MAX_LOG_MESSAGE_LENGTH = 200


class InputValidator:
    """Centralized parameter validation."""

    @staticmethod
    def validate_integer(value: Any, min_val: int, max_val: Optional[int] = None) -> int:
        """Validate integer input within range.

        Args:
            value: Value to validate
            min_val: Minimum allowed value
            max_val: Maximum allowed value (None for unbounded)

        Returns:
            Validated integer

        Raises:
            TypeError: If value is not integral
            ValueError: If value is out of range
        """
        if isinstance(value, bool):
            raise TypeError("Expected integer, got bool")
        if isinstance(value, (float, np.floating)):
            if not float(value).is_integer():
                raise TypeError(f"Expected integer, got {value!r}")
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise TypeError(f"Expected integer, got {type(value).__name__}")

        if value < min_val or (max_val is not None and value > max_val):
            upper = "inf" if max_val is None else max_val
            raise ValueError(f"Value {value} out of range [{min_val}, {upper}]")

        return value

    @staticmethod
    def validate_float(
        value: Any,
        min_val: float = -math.inf,
        max_val: float = math.inf,
        inclusive_min: bool = True,
        inclusive_max: bool = True,
    ) -> float:
        """Validate a finite float within range.

        Args:
            value: Value to validate
            min_val: Minimum allowed value
            max_val: Maximum allowed value
            inclusive_min: Whether min_val itself is allowed
            inclusive_max: Whether max_val itself is allowed

        Returns:
            Validated float

        Raises:
            TypeError: If value cannot be converted to float
            ValueError: If value is not finite or is out of range
        """
        if isinstance(value, bool):
            raise TypeError("Expected float, got bool")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise TypeError(f"Expected float, got {type(value).__name__}")

        if not math.isfinite(value):
            raise ValueError(f"Value {value} is not finite")

        below = value < min_val if inclusive_min else value <= min_val
        above = value > max_val if inclusive_max else value >= max_val
        if below or above:
            left = "[" if inclusive_min else "("
            right = "]" if inclusive_max else ")"
            raise ValueError(f"Value {value} out of range {left}{min_val}, {max_val}{right}")

        return value

    @staticmethod
    def validate_probability(value: Any, allow_zero: bool = True, allow_one: bool = False) -> float:
        """Validate a probability-like parameter (beta, eta, delta)."""
        return InputValidator.validate_float(
            value, 0.0, 1.0, inclusive_min=allow_zero, inclusive_max=allow_one
        )

    @staticmethod
    def validate_choice(value: Any, choices: Iterable[str], name: str = "value") -> str:
        """Validate that value is one of the allowed names."""
        allowed = tuple(choices)
        if not isinstance(value, str):
            raise TypeError(f"{name} must be a string")
        if value not in allowed:
            raise ValueError(f"Unknown {name} {value!r}; expected one of {', '.join(allowed)}")
        return value

    @staticmethod
    def validate_vector(value: Any, length: Optional[int] = None, name: str = "vector") -> np.ndarray:
        """Validate a finite 1-D float vector, optionally of a given length."""
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1:
            raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
        if length is not None and arr.shape[0] != length:
            raise ValueError(f"{name} must have length {length}, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} contains non-finite entries")
        return arr

    @staticmethod
    def validate_unit_vector(value: Any, length: Optional[int] = None, name: str = "direction") -> np.ndarray:
        """Validate a unit-norm direction vector."""
        arr = InputValidator.validate_vector(value, length=length, name=name)
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"{name} must have unit norm, got {norm}")
        return arr


def sanitize_for_logging(data: Any, max_length: int = MAX_LOG_MESSAGE_LENGTH) -> str:
    """Render data for a log line.

    Arrays are summarised by shape and dtype rather than dumped, and the result
    is truncated to max_length characters.
    """
    if isinstance(data, np.ndarray):
        data = f"<array shape={data.shape} dtype={data.dtype}>"
    elif isinstance(data, dict):
        parts = []
        for key, value in data.items():
            if isinstance(value, np.ndarray):
                value = f"<array shape={value.shape}>"
            parts.append(f"{key}={value}")
        data = ", ".join(parts)
    elif not isinstance(data, str):
        data = str(data)

    return data[:max_length] + "..." if len(data) > max_length else data


def config_fingerprint(canonical_text: str) -> str:
    """SHA-256 hex digest of a canonical config rendering."""
    return hashlib.sha256(canonical_text.encode('utf-8')).hexdigest()
