# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""Configuration and logging helpers shared by every module.

Components:
    - Configuration management: get_config(), save_config(), reset_config_cache()
    - Logging utilities: log_debug(), log_warning(), log_error(), log_estimator_call()
    - Decorators: logged_estimator()
    - Paths: get_package_path()

Configuration:
    The packaged ``config.json`` holds the defaults. A user file named by the
    ``ROBUST_MEAN_LAB_CONFIG`` environment variable is merged on top of it
    (nested sections are merged key by key). The merged dict is cached for the
    life of the process; tests call reset_config_cache() after patching.

Logging:
    All messages go to the ``robust_mean_lab`` logger. Library code never
    installs handlers; the CLI does.
    - log_debug(): Only emitted when debug_mode=True in config
    - log_warning(): Always emitted
    - log_error(): Always emitted, can include exception info
    - log_estimator_call(): Emitted when log_estimator_calls=True in config

Usage:
    >>> from .utils import get_config, log_debug, logged_estimator
    >>>
    >>> @logged_estimator("filter_mean")
    ... def filter_mean(X, cfg, rng):
    ...     ...
"""

import copy
import json
import logging
import os
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional, TypeVar

T = TypeVar('T')

CONFIG_ENV_VAR = "ROBUST_MEAN_LAB_CONFIG"
LOGGER_NAME = "robust_mean_lab"

logger = logging.getLogger(LOGGER_NAME)

_config_cache: Dict[str, Any] = {}


def get_package_path() -> Path:
    """Get the path to the installed package directory."""
    return Path(__file__).parent


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_json(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        from .errors import ConfigError
        raise ConfigError(f"Config file {path} must contain a JSON object")
    return data


def get_config() -> Dict[str, Any]:
    """Get the merged package configuration (cached)."""
    if "merged" in _config_cache:
        return _config_cache["merged"]

    config = _read_json(get_package_path() / "config.json")
    override_path = os.environ.get(CONFIG_ENV_VAR)
    if override_path:
        config = _merge(config, _read_json(Path(override_path)))

    _config_cache["merged"] = config
    return config


def get_section(name: str) -> Dict[str, Any]:
    """Get one config section with ``_comment`` keys stripped."""
    section = get_config().get(name, {})
    return {k: v for k, v in section.items() if not k.startswith("_")}


def reset_config_cache() -> None:
    """Forget the cached configuration."""
    _config_cache.clear()


def save_config(config: Dict[str, Any], path: Path) -> None:
    """Save a user configuration file."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config, f, indent=4, sort_keys=True)
    reset_config_cache()


def log_debug(message: str) -> None:
    """Log a debug message if debug mode is enabled."""
    from .validation import sanitize_for_logging

    if get_config().get("debug_mode", False):
        logger.debug(sanitize_for_logging(message))


def log_warning(message: str) -> None:
    """Log a warning message (always emitted)."""
    from .validation import sanitize_for_logging

    logger.warning(sanitize_for_logging(message))


def log_error(message: str, exc_info: Optional[BaseException] = None) -> None:
    """Log an error message (always emitted, even if debug_mode is False)."""
    from .validation import sanitize_for_logging

    safe_message = sanitize_for_logging(message)
    if exc_info:
        logger.error("%s: %s", safe_message, exc_info)
    else:
        logger.error(safe_message)


def log_estimator_call(function_name: str, args: Optional[Dict[str, Any]] = None) -> None:
    """Log an estimator call if estimator call logging is enabled."""
    from .validation import sanitize_for_logging

    if get_config().get("log_estimator_calls", False):
        args_str = sanitize_for_logging(args) if args else ""
        logger.info("%s(%s)", function_name, args_str)


def logged_estimator(name: str) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """Decorator that records each call through log_estimator_call.

    The first positional argument is summarised by its shape when it has one.

    Example:
        >>> @logged_estimator("geometric_median")
        ... def geometric_median(X, tol=1e-7, max_iters=1000):
        ...     ...
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> T:
            summary: Dict[str, Any] = {}
            if args:
                shape = getattr(args[0], "shape", None)
                if shape is not None:
                    summary["shape"] = tuple(shape)
            summary.update({k: v for k, v in kwargs.items() if isinstance(v, (int, float, str))})
            log_estimator_call(name, summary)
            return func(*args, **kwargs)
        return wrapper
    return decorator
