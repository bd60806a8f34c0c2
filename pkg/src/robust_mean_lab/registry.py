# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Estimator registry - maps the estimator names used in experiment configs to
adapters around the estimator functions.

Architecture:
    - ESTIMATOR_REGISTRY: estimator name -> EstimatorEntry
    - register_estimator(): decorator adding an adapter to the registry
    - resolve_params(): merges defaults (from the package config) with user
      parameters and rejects unknown keys
    - run_estimator(): resolve, then call

Extension Points:
    To add an estimator:
    1. Implement it in the module for its family (classic, filtering, ...)
    2. Register an adapter here with @register_estimator(name, defaults, rate)
    3. Add tests in tests/test_registry.py

Example:
    >>> @register_estimator("trimmed", lambda: {"fraction": 0.1}, rate=lambda n, d, eta, p: 0.0)
    ... def _trimmed(X, params, rng, eta):
    ...     ...
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Optional

from . import rates
from .classic import coordinate_wise_median, geometric_median, pruned_mean
from .constants import (
    DEFAULT_GEOMETRIC_MEDIAN_MAX_ITERS,
    DEFAULT_GEOMETRIC_MEDIAN_TOL,
    DEFAULT_PRUNE_RADIUS_FACTOR,
    TAIL_MODEL_BOUNDED_COVARIANCE,
    TAIL_MODEL_GAUSSIAN,
)
from .core import Dataset, EstimatorReport, RngStream, empirical_mean
from .dp import ClipConfig, PrivacyBudget, PrivateMoMConfig, choose_tau, clipped_mean, private_mom_mean
from .errors import ConfigError
from .filtering import FilterConfig, filter_mean
from .mom import MoMConfig, heavy_tailed_mean, mom_univariate
from .utils import get_section

# Filter eta used when neither the estimator params nor the attack supply one
FALLBACK_FILTER_ETA = 0.05

Adapter = Callable[[Dataset, Dict[str, Any], RngStream, float], EstimatorReport]
RateFunction = Callable[[int, int, float, Dict[str, Any]], float]


@dataclass(frozen=True)
class EstimatorEntry:
    name: str
    run: Adapter
    defaults: Callable[[], Dict[str, Any]]
    rate: RateFunction


ESTIMATOR_REGISTRY: Dict[str, EstimatorEntry] = {}


def register_estimator(
    name: str, defaults: Callable[[], Dict[str, Any]], rate: RateFunction
) -> Callable[[Adapter], Adapter]:
    """Register an adapter ``(X, params, rng, eta) -> EstimatorReport``.

    ``eta`` is the contamination fraction of the surrounding experiment;
    adapters may use it as a default.
    """
    def decorator(func: Adapter) -> Adapter:
        ESTIMATOR_REGISTRY[name] = EstimatorEntry(name=name, run=func, defaults=defaults, rate=rate)
        return func
    return decorator


def get_estimator(name: str) -> EstimatorEntry:
    try:
        return ESTIMATOR_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(ESTIMATOR_REGISTRY))
        raise ConfigError(f"Unknown estimator {name!r}; expected one of {known}") from None


def resolve_params(name: str, params: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Defaults for name overlaid with params.

    Raises:
        ConfigError: For an unknown estimator or parameter
    """
    entry = get_estimator(name)
    resolved = entry.defaults()
    unknown = sorted(set(params or {}) - set(resolved))
    if unknown:
        raise ConfigError(f"Unknown parameter(s) for estimator {name!r}: {', '.join(unknown)}")
    resolved.update(params or {})
    return resolved


def run_estimator(
    name: str,
    X: Dataset,
    params: Optional[Mapping[str, Any]],
    rng: RngStream,
    eta: float = 0.0,
) -> EstimatorReport:
    entry = get_estimator(name)
    return entry.run(X, resolve_params(name, params), rng, eta)


def predicted_rate(name: str, n: int, d: int, eta: float, params: Optional[Mapping[str, Any]] = None) -> float:
    entry = get_estimator(name)
    return entry.rate(n, d, eta, resolve_params(name, params))


def _effective_eta(params: Dict[str, Any], eta: float) -> float:
    if params.get("eta") is not None:
        return float(params["eta"])
    return eta if eta > 0 else FALLBACK_FILTER_ETA


def _no_params() -> Dict[str, Any]:
    return {}


@register_estimator("empirical_mean", _no_params, lambda n, d, eta, p: rates.parametric_rate(n, d))
def _empirical_mean(X, params, rng, eta):
    return EstimatorReport(empirical_mean(X))


@register_estimator(
    "coordinate_median",
    _no_params,
    lambda n, d, eta, p: rates.parametric_rate(n, d) + rates.geometric_median_cost(eta, d),
)
def _coordinate_median(X, params, rng, eta):
    return EstimatorReport(coordinate_wise_median(X))


@register_estimator(
    "geometric_median",
    lambda: {"tol": DEFAULT_GEOMETRIC_MEDIAN_TOL, "max_iters": DEFAULT_GEOMETRIC_MEDIAN_MAX_ITERS},
    lambda n, d, eta, p: rates.parametric_rate(n, d) + rates.geometric_median_cost(eta, d),
)
def _geometric_median(X, params, rng, eta):
    return geometric_median(X, tol=params["tol"], max_iters=params["max_iters"])


@register_estimator(
    "pruned_mean",
    lambda: {"radius_factor": DEFAULT_PRUNE_RADIUS_FACTOR},
    lambda n, d, eta, p: rates.parametric_rate(n, d) + rates.geometric_median_cost(eta, d),
)
def _pruned_mean(X, params, rng, eta):
    return pruned_mean(X, radius_factor=params["radius_factor"])


def _filter_defaults() -> Dict[str, Any]:
    section = get_section("filter")
    return {
        "eta": None,
        "threshold_constant": section.get("threshold_constant", 9.0),
        "tail_slack": section.get("tail_slack", 0.01),
        "removal_cap_multiplier": section.get("removal_cap_multiplier", 3.0),
        "eigen_tol": section.get("eigen_tol", 1e-9),
        "tail_model": TAIL_MODEL_GAUSSIAN,
    }


def _filter_rate(n, d, eta, p):
    if p["tail_model"] == TAIL_MODEL_BOUNDED_COVARIANCE:
        return rates.parametric_rate(n, d) + rates.bounded_covariance_cost(eta)
    return rates.parametric_rate(n, d) + rates.gaussian_contamination_cost(eta)


@register_estimator("filter", _filter_defaults, _filter_rate)
def _filter(X, params, rng, eta):
    cfg = FilterConfig(
        eta=_effective_eta(params, eta),
        threshold_constant=params["threshold_constant"],
        tail_slack=params["tail_slack"],
        removal_cap_multiplier=params["removal_cap_multiplier"],
        tail_model=params["tail_model"],
        eigen_tol=params["eigen_tol"],
    )
    return filter_mean(X, cfg, rng)


@register_estimator(
    "mom_univariate",
    lambda: {"k": 1, "shuffle": True},
    lambda n, d, eta, p: (p["k"] / n) ** 0.5,
)
def _mom_univariate(X, params, rng, eta):
    if X.d != 1:
        raise ConfigError("mom_univariate needs d = 1")
    shuffle = rng if params["shuffle"] else None
    return EstimatorReport([mom_univariate(X.rows[:, 0], params["k"], shuffle)])


def _heavy_tailed_defaults() -> Dict[str, Any]:
    section = get_section("mom")
    return {
        "beta": 0.01,
        "eta": None,
        "k_constant": section.get("k_constant", 3.0),
        "lambda_constant": section.get("lambda_constant", 6.0),
        "gamma": section.get("gamma", 0.05),
        "descent_max_iters": section.get("descent_max_iters", 50),
        "aggregator": "stability",
    }


@register_estimator(
    "heavy_tailed",
    _heavy_tailed_defaults,
    lambda n, d, eta, p: rates.sub_gaussian_rate(n, d, p["beta"]) + rates.bounded_covariance_cost(eta),
)
def _heavy_tailed(X, params, rng, eta):
    cfg = MoMConfig(
        beta=params["beta"],
        eta=params["eta"] if params["eta"] is not None else eta,
        k_constant=params["k_constant"],
        lambda_constant=params["lambda_constant"],
        aggregator=params["aggregator"],
        gamma=params["gamma"],
        descent_max_iters=params["descent_max_iters"],
    )
    return heavy_tailed_mean(X, cfg, rng)


def _clipped_rate(n, d, eta, p):
    if p["delta"] == 0:
        return rates.pure_dp_clipped_rate(n, d, p["epsilon"])
    return rates.approximate_dp_clipped_rate(n, d, p["epsilon"], p["delta"])


@register_estimator("clipped_mean", lambda: {"epsilon": 1.0, "delta": 0.0, "tau": None}, _clipped_rate)
def _clipped_mean(X, params, rng, eta):
    budget = PrivacyBudget(params["epsilon"], params["delta"])
    tau = params["tau"] if params["tau"] is not None else choose_tau(X.n, X.d, budget)
    return clipped_mean(X, ClipConfig.for_dataset(tau, X.n, X.d), budget, rng)


def _private_mom_defaults() -> Dict[str, Any]:
    section = get_section("privacy")
    return {
        "epsilon": 1.0,
        "c1": section.get("c1", 10.0),
        "c2": section.get("c2", 8.0),
        "net_resolution": section.get("direction_net_resolution", 360),
    }


@register_estimator(
    "private_mom",
    _private_mom_defaults,
    lambda n, d, eta, p: rates.private_mom_rate(n, d, p["epsilon"]),
)
def _private_mom(X, params, rng, eta):
    cfg = PrivateMoMConfig(c1=params["c1"], c2=params["c2"], net_resolution=params["net_resolution"])
    return private_mom_mean(X, PrivacyBudget(params["epsilon"]), cfg, rng)
