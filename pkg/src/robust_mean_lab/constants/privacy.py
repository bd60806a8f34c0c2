# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Differential privacy constants.
"""

DEFAULT_PRIVATE_MOM_C1 = 10.0  # k = ceil(C1 * d * ln(n) / epsilon)
DEFAULT_PRIVATE_MOM_C2 = 8.0  # spacing = C2 * sqrt(d / (epsilon * n))
COVER_MAX_DIMENSION = 3  # Cover size is (2R/r)^d
GAUSSIAN_MECHANISM_DELTA_NUMERATOR = 1.25  # sigma = D2 * sqrt(2 ln(1.25/delta)) / epsilon
CLIP_SENSITIVITY_FACTOR = 2.0  # Replace-one neighbouring relation
AUDIT_SLACK = 1e-9
