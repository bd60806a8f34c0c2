# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Predicted error rates, reported next to every benchmark summary.

All rates drop their absolute constants; they are meant for ratio and slope
comparisons across n, d and eta, not as error bounds.
"""

import math


def parametric_rate(n: int, d: int) -> float:
    """sqrt(d / n), the clean Gaussian rate."""
    return math.sqrt(d / n)


def gaussian_contamination_cost(eta: float) -> float:
    """eta sqrt(ln(1/eta)), the filter's cost under Gaussian tails."""
    if eta <= 0:
        return 0.0
    return eta * math.sqrt(math.log(1.0 / eta))


def bounded_covariance_cost(eta: float) -> float:
    """sqrt(eta), the cost when only the covariance is bounded."""
    return math.sqrt(max(eta, 0.0))


def geometric_median_cost(eta: float, d: int) -> float:
    """eta sqrt(d), paid by the coordinate-wise and geometric medians."""
    return max(eta, 0.0) * math.sqrt(d)


def sub_gaussian_rate(n: int, d: int, beta: float) -> float:
    """sqrt(d/n) + sqrt(ln(1/beta)/n)."""
    return math.sqrt(d / n) + math.sqrt(math.log(1.0 / beta) / n)


def pure_dp_clipped_rate(n: int, d: int, epsilon: float) -> float:
    """sqrt(d^(3/2) / (n eps)) for the Laplace clipped mean."""
    return math.sqrt(d ** 1.5 / (n * epsilon))


def approximate_dp_clipped_rate(n: int, d: int, epsilon: float, delta: float) -> float:
    """sqrt(d sqrt(ln(1/delta)) / (n eps)) for the Gaussian clipped mean."""
    return math.sqrt(d * math.sqrt(math.log(1.0 / delta)) / (n * epsilon))


def private_mom_rate(n: int, d: int, epsilon: float) -> float:
    """sqrt(d/n) + sqrt(d/(eps n)), the cover spacing scale of private MoM."""
    return math.sqrt(d / n) + math.sqrt(d / (epsilon * n))
