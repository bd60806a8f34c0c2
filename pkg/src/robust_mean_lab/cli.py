# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Command-line interface.

Subcommands:
    generate  sample (and optionally contaminate) one dataset file
    estimate  run one registered estimator on a dataset file
    run       Monte Carlo trials for one experiment config
    sweep     run the [sweep] grid of an experiment config
    audit     exact privacy-loss audits of the finite mechanisms

Exit codes: 0 success, 1 audit violation, 2 config error, 3 all trials failed.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from . import __version__
from .bench import (
    AUDIT_MECHANISMS,
    load_config,
    parse_config,
    run_audit,
    run_trials,
    sweep,
    with_overrides,
    write_outputs,
    write_sweep_csv,
)
from .constants import (
    EXIT_ALL_TRIALS_FAILED,
    EXIT_AUDIT_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    STREAM_ATTACK,
    STREAM_ESTIMATOR,
    STREAM_SAMPLE,
)
from .core import RngStream
from .dataset_io import FORMAT_BINARY, FORMAT_CSV, read_dataset, write_dataset
from .errors import AllTrialsFailedError, ConfigError, DatasetFormatError, RobustMeanLabError
from .registry import ESTIMATOR_REGISTRY, run_estimator
from .synth import contaminate, sample
from .utils import LOGGER_NAME, log_debug

LOG_FORMAT = "[robust-mean-lab] %(levelname)s: %(message)s"

Handler = Callable[[argparse.Namespace], int]
COMMANDS: Dict[str, Handler] = {}


def command(name: str) -> Callable[[Handler], Handler]:
    def decorator(func: Handler) -> Handler:
        COMMANDS[name] = func
        return func
    return decorator


def setup_logging(verbose: bool = False) -> None:
    """Attach one stream handler to the package logger (idempotent)."""
    logger = logging.getLogger(LOGGER_NAME)
    if not any(getattr(h, "_robust_mean_lab", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._robust_mean_lab = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)


def _load_experiment(args: argparse.Namespace):
    if not args.config:
        raise ConfigError("--config is required")
    cfg = parse_config(load_config(args.config))
    return with_overrides(cfg, master_seed=args.seed, workers=getattr(args, "workers", None))


def _parse_param(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _params(pairs: Optional[Sequence[str]]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"Expected KEY=VALUE, got {pair!r}")
        params[key.strip()] = _parse_param(value.strip())
    return params


def _emit(payload: Dict[str, Any], out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


@command("generate")
def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _load_experiment(args)
    if not args.out:
        raise ConfigError("--out is required")
    stream = RngStream(cfg.master_seed, 0)
    clean = sample(cfg.distribution, cfg.n, stream.spawn(STREAM_SAMPLE))
    result = contaminate(clean, cfg.attack, stream.spawn(STREAM_ATTACK))
    write_dataset(result.dataset, args.out, args.format)
    log_debug(f"wrote {cfg.n}x{cfg.d} dataset with {len(result.corrupted)} corrupted rows to {args.out}")
    return EXIT_OK


@command("estimate")
def cmd_estimate(args: argparse.Namespace) -> int:
    try:
        X = read_dataset(args.data)
    except (OSError, DatasetFormatError) as e:
        raise ConfigError(f"Cannot read dataset {args.data}: {e}") from e
    stream = RngStream(args.seed if args.seed is not None else 0, 0).spawn(STREAM_ESTIMATOR)
    report = run_estimator(args.estimator, X, _params(args.param), stream, eta=args.eta)
    _emit(
        {
            "estimator": args.estimator,
            "estimate": [float(v) for v in report.estimate],
            "iterations": report.iterations,
            "removed": len(report.removed_indices),
            "warnings": sorted(report.warnings),
        },
        args.out,
    )
    return EXIT_OK


@command("run")
def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_experiment(args)
    result = run_trials(cfg)
    prefix = args.out or cfg.output_path
    if prefix:
        csv_path, json_path = write_outputs(prefix, cfg, result)
        log_debug(f"wrote {csv_path} and {json_path}")
    else:
        _emit(result.summary.as_row(), None)
    return EXIT_OK


@command("sweep")
def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_experiment(args)
    rows = sweep(cfg)
    out = args.out or (f"{cfg.output_path}_sweep.csv" if cfg.output_path else None)
    if out:
        write_sweep_csv(out, rows)
    else:
        for row in rows:
            print(json.dumps({"params": row.params, "summary": row.summary.as_row() if row.summary else None,
                              "error": row.error}, sort_keys=True))
    return EXIT_OK if any(row.summary is not None for row in rows) else EXIT_ALL_TRIALS_FAILED


@command("audit")
def cmd_audit(args: argparse.Namespace) -> int:
    summary = run_audit(args.mechanism, args.epsilon, args.instances, seed=args.seed or 0)
    _emit(
        {
            "mechanism": summary.mechanism,
            "epsilon": summary.epsilon,
            "instances": summary.instances,
            "max_loss": summary.max_loss,
            "violations": summary.violations,
        },
        args.out,
    )
    return EXIT_OK if summary.passed else EXIT_AUDIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-mean-lab", description="Robust mean estimation lab")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config: bool = True) -> None:
        if config:
            p.add_argument("--config", help="experiment config (TOML or JSON)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("generate", help="write one sampled dataset")
    common(p)
    p.add_argument("--format", choices=(FORMAT_CSV, FORMAT_BINARY), default=FORMAT_CSV)

    p = sub.add_parser("estimate", help="run one estimator on a dataset file")
    common(p, config=False)
    p.add_argument("--data", required=True, help="CSV or RMD1 dataset")
    p.add_argument("--estimator", required=True, choices=sorted(ESTIMATOR_REGISTRY))
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="estimator parameter (JSON value)")
    p.add_argument("--eta", type=float, default=0.0, help="contamination fraction hint")

    for name, text in (("run", "Monte Carlo trials for one config"), ("sweep", "run the config's [sweep] grid")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--workers", type=int, help="worker processes")

    p = sub.add_parser("audit", help="exact privacy-loss audits")
    common(p, config=False)
    p.add_argument("--mechanism", required=True, choices=AUDIT_MECHANISMS)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--instances", type=int, default=1000)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    logger = logging.getLogger(LOGGER_NAME)

    try:
        return COMMANDS[args.command](args)
    except AllTrialsFailedError as e:
        logger.error("%s", e)
        return EXIT_ALL_TRIALS_FAILED
    except (ConfigError, DatasetFormatError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG_ERROR
    except (RobustMeanLabError, TypeError, ValueError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
