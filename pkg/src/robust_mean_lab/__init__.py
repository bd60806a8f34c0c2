# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Robust Mean Lab
~~~~~~~~~~~~~~~

Robust, heavy-tailed and differentially private mean estimators on one data
model, with an adversary suite, brute-force oracles, an exact privacy auditor
and a Monte Carlo benchmark harness.

Modules:
    - core: Dataset, RngStream, EstimatorReport, empirical moments, top_eigenpair
    - classic: medians, Tukey depth, pruned mean
    - synth: clean distributions and adversaries
    - filtering: stability oracle, spectral certificates, the eigenvalue filter
    - mom: median-of-means, bucket aggregators, combinatorial scores
    - dp: clipped means, exponential mechanism, private MoM, privacy audits
    - registry / bench / cli: the experiment harness

Quick Start:
    >>> from robust_mean_lab.core import RngStream
    >>> from robust_mean_lab.synth import AttackSpec, DistributionSpec, contaminate, sample
    >>> from robust_mean_lab.filtering import FilterConfig, filter_mean
    >>> rng = RngStream(master_seed=1)
    >>> clean = sample(DistributionSpec("gaussian", d=16), 800, rng.spawn(0))
    >>> dirty = contaminate(clean, AttackSpec("mean_shift", eta=0.1, magnitude=100.0), rng.spawn(1)).dataset
    >>> report = filter_mean(dirty, FilterConfig(eta=0.1), rng.spawn(2))

:license: MIT, see LICENSE for more details.
"""

__version__ = "0.1.0"
__author__ = "Robust Mean Lab Contributors"
