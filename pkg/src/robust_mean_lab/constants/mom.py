# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Median-of-means constants.
"""

DEFAULT_K_CONSTANT = 3.0  # C_k in k = ceil(C_k * (ln(1/beta) + eta * n))
DEFAULT_LAMBDA_CONSTANT = 6.0  # C_lambda: sqrt(lambda) = C_lambda * (sqrt(d/n) + sqrt(k/n))
DEFAULT_MOM_GAMMA = 0.05
DEFAULT_DESCENT_MAX_ITERS = 50
SIMPLE_MEDIAN_QUANTILE = 0.6  # Rank fraction used by simple_median

AGGREGATOR_SIMPLE_MEDIAN = "simple_median"
AGGREGATOR_STABILITY = "stability"
AGGREGATOR_DESCENT = "descent"

DEFAULT_NET_RESOLUTION = 360  # Angular steps per full turn in direction nets
