# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Constants package for robust_mean_lab.

This package organizes constants into logical categories:
- numeric: tolerances, iteration caps, oracle limits, dataset magic
- filtering: eigenvalue-filter gate and tail-model constants
- mom: median-of-means constants and aggregator names
- privacy: differential privacy constants
- bench: exit codes, CSV schema, stream keys, warning flags

All constants are re-exported from this module.
"""

from .numeric import *
from .filtering import *
from .mom import *
from .privacy import *
from .bench import *

__all__ = [
    # Numeric constants
    'DEFAULT_EIGEN_TOL',
    'SYMMETRY_TOL',
    'COINCIDENCE_TOL',
    'NORMALIZATION_TOL',
    'UNIT_NORM_TOL',
    'DEFAULT_GEOMETRIC_MEDIAN_TOL',
    'DEFAULT_GEOMETRIC_MEDIAN_MAX_ITERS',
    'DEFAULT_PRUNE_RADIUS_FACTOR',
    'DEFAULT_TUKEY_DIRECTIONS',
    'DEFAULT_SPECTRAL_CERTIFY_ROUNDS',
    'STABILITY_ORACLE_MAX_N',
    'ORACLE_CHUNK_SIZE',
    'DATASET_MAGIC',

    # Filter constants
    'FILTER_ETA_MAX',
    'DEFAULT_THRESHOLD_CONSTANT',
    'DEFAULT_TAIL_SLACK',
    'TAIL_FACTOR',
    'MIN_THRESHOLD',
    'DEFAULT_REMOVAL_CAP_MULTIPLIER',
    'TAIL_MODEL_GAUSSIAN',
    'TAIL_MODEL_BOUNDED_COVARIANCE',

    # Median-of-means constants
    'DEFAULT_K_CONSTANT',
    'DEFAULT_LAMBDA_CONSTANT',
    'DEFAULT_MOM_GAMMA',
    'DEFAULT_DESCENT_MAX_ITERS',
    'SIMPLE_MEDIAN_QUANTILE',
    'AGGREGATOR_SIMPLE_MEDIAN',
    'AGGREGATOR_STABILITY',
    'AGGREGATOR_DESCENT',
    'DEFAULT_NET_RESOLUTION',

    # Privacy constants
    'DEFAULT_PRIVATE_MOM_C1',
    'DEFAULT_PRIVATE_MOM_C2',
    'COVER_MAX_DIMENSION',
    'GAUSSIAN_MECHANISM_DELTA_NUMERATOR',
    'CLIP_SENSITIVITY_FACTOR',
    'AUDIT_SLACK',

    # Bench constants
    'EXIT_OK',
    'EXIT_CONFIG_ERROR',
    'EXIT_ALL_TRIALS_FAILED',
    'EXIT_AUDIT_FAILED',
    'TRIAL_CSV_COLUMNS',
    'SUMMARY_QUANTILES',
    'STREAM_SAMPLE',
    'STREAM_ATTACK',
    'STREAM_ESTIMATOR',
    'WARN_REMOVAL_CAP',
    'WARN_MAX_ITERS',
    'WARN_NOT_CONVERGED',
    'WARN_EIGEN_NOT_CONVERGED',
    'WARN_NO_STABLE_SUBSET',
    'WARN_TRIAL_FAILED',
]
