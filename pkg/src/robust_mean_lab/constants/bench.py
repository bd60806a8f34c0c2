# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Benchmark harness constants: exit codes, CSV schema, warning flags.
"""

# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_ALL_TRIALS_FAILED = 3
EXIT_AUDIT_FAILED = 1

TRIAL_CSV_COLUMNS = ("trial", "seed", "error", "runtime_ms", "warnings")
SUMMARY_QUANTILES = (("median", 0.5), ("p95", 0.95), ("p99", 0.99), ("p999", 0.999))

# RngStream sub-stream keys used inside one trial
STREAM_SAMPLE = 0
STREAM_ATTACK = 1
STREAM_ESTIMATOR = 2

# Warning flags carried by EstimatorReport.warnings
WARN_REMOVAL_CAP = "removal_cap_exceeded"
WARN_MAX_ITERS = "max_iters_exceeded"
WARN_NOT_CONVERGED = "not_converged"
WARN_EIGEN_NOT_CONVERGED = "eigen_not_converged"
WARN_NO_STABLE_SUBSET = "no_stable_subset"
WARN_TRIAL_FAILED = "trial_failed"
