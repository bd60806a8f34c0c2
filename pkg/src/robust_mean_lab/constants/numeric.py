# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Numerical tolerances and linear-algebra constants.
"""

DEFAULT_EIGEN_TOL = 1e-9  # Residual tolerance for top_eigenpair
SYMMETRY_TOL = 1e-10  # Relative asymmetry accepted by top_eigenpair
COINCIDENCE_TOL = 1e-12  # Weiszfeld iterate treated as sitting on a data point
NORMALIZATION_TOL = 1e-12  # Probability vectors must sum to 1 within this
UNIT_NORM_TOL = 1e-9  # Accepted deviation of a direction from unit norm

DEFAULT_GEOMETRIC_MEDIAN_TOL = 1e-7
DEFAULT_GEOMETRIC_MEDIAN_MAX_ITERS = 1000
DEFAULT_PRUNE_RADIUS_FACTOR = 2.0

DEFAULT_TUKEY_DIRECTIONS = 256
DEFAULT_SPECTRAL_CERTIFY_ROUNDS = 50  # Frank-Wolfe rounds in certify_spectral_center

STABILITY_ORACLE_MAX_N = 20  # Brute-force subset enumeration limit
ORACLE_CHUNK_SIZE = 20000  # Subsets evaluated per vectorised batch

DATASET_MAGIC = b"RMD1"
