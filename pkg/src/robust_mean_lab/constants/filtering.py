# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Eigenvalue-filter constants.
"""

FILTER_ETA_MAX = 1.0 / 3.0  # Upper bound on the contamination fraction the filter accepts
DEFAULT_THRESHOLD_CONSTANT = 9.0  # C in the gate 1 + C * eta * log(1/eta)
DEFAULT_TAIL_SLACK = 0.01  # Additive slack on the predicted tail
TAIL_FACTOR = 8.0  # Multiplicative "much greater than" factor on the predicted tail
MIN_THRESHOLD = 2.0  # Smallest threshold L considered by the scan
DEFAULT_REMOVAL_CAP_MULTIPLIER = 3.0

TAIL_MODEL_GAUSSIAN = "gaussian"
TAIL_MODEL_BOUNDED_COVARIANCE = "bounded_covariance"
