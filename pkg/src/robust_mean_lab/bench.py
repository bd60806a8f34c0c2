# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Monte Carlo benchmark harness.

Components:
    - ExperimentConfig: distribution x attack x estimator x (n, d, trials, seed)
    - load_config(), parse_config(): TOML or JSON experiment files
    - run_trials(): seeded trials (optionally in a process pool) plus a
      nearest-rank quantile summary
    - sweep(): cross product of parameter overrides, one summary row each
    - run_audit(): randomized neighbouring-pair audits of the finite mechanisms
    - write_trials_csv(), write_summary_json(), write_sweep_csv()

Trial t draws everything from RngStream(master_seed, t), so records do not
depend on execution order or worker count, and adding trials never changes
earlier ones.
"""

import copy
import csv
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .constants import (
    AUDIT_SLACK,
    STREAM_ATTACK,
    STREAM_ESTIMATOR,
    STREAM_SAMPLE,
    SUMMARY_QUANTILES,
    TRIAL_CSV_COLUMNS,
    WARN_TRIAL_FAILED,
)
from .core import RngStream
from .dp import (
    PrivacyBudget,
    PrivateMoMConfig,
    audit_mechanism,
    exponential_mechanism_probabilities,
    inverse_sensitivity_scores,
    private_mom_candidates,
)
from .errors import AllTrialsFailedError, ConfigError, RobustMeanLabError
from .registry import get_estimator, predicted_rate, resolve_params, run_estimator
from .synth import AttackSpec, DistributionSpec, contaminate, sample
from .utils import get_section, log_debug, log_error, log_warning
from .validation import InputValidator, config_fingerprint

PathLike = Union[str, Path]

SECTIONS = ("experiment", "distribution", "attack", "estimator", "sweep")
EXPERIMENT_KEYS = ("n", "d", "trials", "master_seed", "output", "workers", "record_timing")
DISTRIBUTION_KEYS = ("kind", "mean", "covariance_diag", "dof")
ATTACK_KEYS = ("kind", "eta", "magnitude", "direction")
ESTIMATOR_KEYS = ("name", "params")
SUMMARY_COLUMNS = ("count", "failed", "mean", "median", "p95", "p99", "p999", "predicted_rate")

AUDIT_MECHANISMS = ("exponential", "inverse_sensitivity", "private_mom")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    distribution: DistributionSpec
    attack: AttackSpec
    estimator: str
    estimator_params: Dict[str, Any]
    n: int
    d: int
    trials: int
    master_seed: int
    output_path: Optional[str] = None
    workers: int = 1
    record_timing: bool = False
    sweep_grid: Dict[str, List[Any]] = field(default_factory=dict)
    raw: Dict[str, Any] = field(default_factory=dict)

    def canonical(self) -> str:
        """Canonical JSON of the experiment (used for the summary fingerprint)."""
        data = copy.deepcopy(self.raw)
        data.get("experiment", {}).pop("workers", None)
        data.pop("sweep", None)
        return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    error: Optional[float]
    runtime_ms: float
    warnings: Tuple[str, ...] = ()
    message: str = ""

    @property
    def failed(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class Summary:
    count: int
    failed: int
    mean: float
    quantiles: Dict[str, float]
    predicted_rate: float
    fingerprint: str

    def as_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"count": self.count, "failed": self.failed, "mean": self.mean}
        row.update(self.quantiles)
        row["predicted_rate"] = self.predicted_rate
        return row


@dataclass(frozen=True)
class ExperimentResult:
    records: List[TrialRecord]
    summary: Summary


@dataclass(frozen=True)
class SweepRow:
    params: Dict[str, Any]
    summary: Optional[Summary]
    error: str = ""


@dataclass(frozen=True)
class AuditSummary:
    mechanism: str
    epsilon: float
    instances: int
    max_loss: float
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def load_config(path: PathLike) -> Dict[str, Any]:
    """Read a TOML or JSON experiment file into a dict.

    Raises:
        ConfigError: If the file is missing or does not parse
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e

    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"Cannot parse config {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must be a table / object")
    return data


def _section(data: Mapping[str, Any], name: str, allowed: Sequence[str], required: bool = True) -> Dict[str, Any]:
    section = data.get(name)
    if section is None:
        if required:
            raise ConfigError(f"Missing [{name}] section")
        return {}
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in [{name}]: {', '.join(unknown)}")
    return dict(section)


def parse_config(data: Mapping[str, Any]) -> ExperimentConfig:
    """Validate an experiment dict and build the ExperimentConfig.

    Raises:
        ConfigError: For unknown sections or keys and invalid values
    """
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"Unknown section(s): {', '.join(unknown)}")

    experiment = _section(data, "experiment", EXPERIMENT_KEYS)
    distribution = _section(data, "distribution", DISTRIBUTION_KEYS)
    attack = _section(data, "attack", ATTACK_KEYS, required=False)
    estimator = _section(data, "estimator", ESTIMATOR_KEYS)
    grid = data.get("sweep", {})
    bench_defaults = get_section("bench")

    try:
        n = InputValidator.validate_integer(experiment.get("n"), 1)
        d = InputValidator.validate_integer(experiment.get("d"), 1)
        trials = InputValidator.validate_integer(experiment.get("trials"), 1)
        master_seed = InputValidator.validate_integer(experiment.get("master_seed", 0), 0, 2 ** 64 - 1)
        workers = InputValidator.validate_integer(experiment.get("workers", bench_defaults.get("workers", 1)), 1)
        record_timing = bool(experiment.get("record_timing", bench_defaults.get("record_timing", False)))

        dist = DistributionSpec(d=d, **distribution)
        attack_spec = AttackSpec(**attack)
        if attack_spec.direction is not None and len(attack_spec.direction) != d:
            raise ConfigError(f"attack direction must have length {d}")

        name = estimator.get("name")
        if not isinstance(name, str):
            raise ConfigError("[estimator] needs a name")
        params = dict(estimator.get("params", {}))
        resolve_params(name, params)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e

    if not isinstance(grid, dict) or not all(isinstance(v, list) for v in grid.values()):
        raise ConfigError("[sweep] must map parameter names to lists")

    output = experiment.get("output")
    return ExperimentConfig(
        distribution=dist,
        attack=attack_spec,
        estimator=name,
        estimator_params=params,
        n=n,
        d=d,
        trials=trials,
        master_seed=master_seed,
        output_path=str(output) if output is not None else None,
        workers=workers,
        record_timing=record_timing,
        sweep_grid={k: list(v) for k, v in grid.items()},
        raw=copy.deepcopy(dict(data)),
    )


def with_overrides(cfg: ExperimentConfig, **experiment: Any) -> ExperimentConfig:
    """Re-parse cfg with [experiment] keys replaced (seed, workers, output)."""
    data = copy.deepcopy(cfg.raw)
    data.setdefault("experiment", {}).update({k: v for k, v in experiment.items() if v is not None})
    return parse_config(data)


def _trial_seed(stream: RngStream) -> int:
    return int(stream.seed_sequence().generate_state(1, dtype=np.uint64)[0])


def run_trial(cfg: ExperimentConfig, t: int) -> TrialRecord:
    """One seeded trial: sample, contaminate, estimate, score."""
    stream = RngStream(cfg.master_seed, t)
    seed = _trial_seed(stream)
    started = time.perf_counter()
    try:
        clean = sample(cfg.distribution, cfg.n, stream.spawn(STREAM_SAMPLE))
        dirty = contaminate(clean, cfg.attack, stream.spawn(STREAM_ATTACK)).dataset
        report = run_estimator(
            cfg.estimator, dirty, cfg.estimator_params, stream.spawn(STREAM_ESTIMATOR), eta=cfg.attack.eta
        )
        error = float(np.linalg.norm(report.estimate - cfg.distribution.mean))
        warnings = tuple(sorted(report.warnings))
        message = ""
    except (RobustMeanLabError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        log_warning(f"trial {t} failed: {e}")
        error, warnings, message = None, (WARN_TRIAL_FAILED,), str(e)

    runtime = (time.perf_counter() - started) * 1000.0 if cfg.record_timing else 0.0
    return TrialRecord(trial=t, seed=seed, error=error, runtime_ms=runtime, warnings=warnings, message=message)


def _run_trial_args(args: Tuple[ExperimentConfig, int]) -> TrialRecord:
    return run_trial(*args)


def nearest_rank(values: Sequence[float], q: float) -> float:
    """Nearest-rank quantile: the ceil(q N)-th smallest value."""
    s = sorted(values)
    if not s:
        raise ValueError("no values")
    rank = min(len(s), max(1, math.ceil(round(q * len(s), 9))))
    return float(s[rank - 1])


def summarize(cfg: ExperimentConfig, records: Sequence[TrialRecord]) -> Summary:
    """Summary over the successful trials.

    Raises:
        AllTrialsFailedError: If no trial succeeded
    """
    errors = [r.error for r in records if r.error is not None]
    if not errors:
        raise AllTrialsFailedError(f"all {len(records)} trials failed")
    return Summary(
        count=len(records),
        failed=len(records) - len(errors),
        mean=float(np.mean(errors)),
        quantiles={name: nearest_rank(errors, q) for name, q in SUMMARY_QUANTILES},
        predicted_rate=predicted_rate(cfg.estimator, cfg.n, cfg.d, cfg.attack.eta, cfg.estimator_params),
        fingerprint=config_fingerprint(cfg.canonical()),
    )


def run_trials(cfg: ExperimentConfig, workers: Optional[int] = None) -> ExperimentResult:
    """Run every trial of cfg and summarise.

    Args:
        cfg: Experiment configuration
        workers: Process count (defaults to cfg.workers); output does not depend on it

    Raises:
        AllTrialsFailedError: If every trial failed
    """
    get_estimator(cfg.estimator)
    workers = workers or cfg.workers
    jobs = [(cfg, t) for t in range(cfg.trials)]
    log_debug(f"run_trials {cfg.estimator} trials={cfg.trials} workers={workers}")

    if workers <= 1:
        records = [_run_trial_args(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial_args, jobs, chunksize=max(1, cfg.trials // (4 * workers))))

    records.sort(key=lambda r: r.trial)
    return ExperimentResult(records=records, summary=summarize(cfg, records))


def _grid_values(values: List[Any]) -> List[Any]:
    if values and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        return sorted(values)
    return values


def _apply_override(data: Dict[str, Any], key: str, value: Any) -> None:
    if "." not in key:
        data.setdefault("experiment", {})[key] = value
        return
    section, name = key.split(".", 1)
    if section == "estimator":
        data.setdefault("estimator", {}).setdefault("params", {})[name] = value
    elif section in ("experiment", "distribution", "attack"):
        data.setdefault(section, {})[name] = value
    else:
        raise ConfigError(f"Cannot sweep over {key!r}")


def sweep(
    cfg: ExperimentConfig, grid: Optional[Mapping[str, List[Any]]] = None, workers: Optional[int] = None
) -> List[SweepRow]:
    """Run cfg at every point of the grid's cross product.

    Keys are experiment keys (``n``, ``d``, ``trials``) or dotted
    ``distribution.*``, ``attack.*`` and ``estimator.*`` names; numeric value
    lists run in ascending order. A failing cell yields a row with its error
    message instead of a summary.

    Raises:
        ConfigError: If the grid is empty
    """
    grid = dict(grid if grid is not None else cfg.sweep_grid)
    if not grid or any(len(v) == 0 for v in grid.values()):
        raise ConfigError("sweep grid is empty")

    keys = list(grid)
    rows: List[SweepRow] = []
    for values in itertools.product(*(_grid_values(list(grid[k])) for k in keys)):
        point = dict(zip(keys, values))
        data = copy.deepcopy(cfg.raw)
        data.pop("sweep", None)
        try:
            for key, value in point.items():
                _apply_override(data, key, value)
            result = run_trials(parse_config(data), workers=workers)
            rows.append(SweepRow(params=point, summary=result.summary))
        except (ConfigError, AllTrialsFailedError) as e:
            log_error(f"sweep cell {point} failed", e)
            rows.append(SweepRow(params=point, summary=None, error=str(e)))
    return rows


def _csv_float(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_trials_csv(path: PathLike, records: Sequence[TrialRecord]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRIAL_CSV_COLUMNS)
        for r in records:
            writer.writerow([r.trial, r.seed, _csv_float(r.error), _csv_float(r.runtime_ms), ";".join(r.warnings)])
    return path


def write_summary_json(path: PathLike, cfg: ExperimentConfig, summary: Summary) -> Path:
    path = Path(path)
    payload = {
        "estimator": cfg.estimator,
        "n": cfg.n,
        "d": cfg.d,
        "trials": cfg.trials,
        "master_seed": cfg.master_seed,
        "config_sha256": summary.fingerprint,
        "summary": summary.as_row(),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def write_sweep_csv(path: PathLike, rows: Sequence[SweepRow]) -> Path:
    path = Path(path)
    keys = list(rows[0].params) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(keys + list(SUMMARY_COLUMNS) + ["status"])
        for row in rows:
            values = [row.params[k] for k in keys]
            if row.summary is None:
                writer.writerow(values + [""] * len(SUMMARY_COLUMNS) + [f"failed: {row.error}"])
            else:
                stats = row.summary.as_row()
                writer.writerow(values + [stats[c] for c in SUMMARY_COLUMNS] + ["ok"])
    return path


def write_outputs(prefix: PathLike, cfg: ExperimentConfig, result: ExperimentResult) -> Tuple[Path, Path]:
    """Write <prefix>.csv (trials) and <prefix>.json (summary)."""
    prefix = Path(prefix)
    if prefix.parent and not prefix.parent.exists():
        prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path = write_trials_csv(prefix.with_suffix(".csv"), result.records)
    json_path = write_summary_json(prefix.with_suffix(".json"), cfg, result.summary)
    return csv_path, json_path


def _audit_exponential(gen: np.random.Generator, budget: PrivacyBudget) -> float:
    m = int(gen.integers(2, 11))
    scores = gen.uniform(-10.0, 0.0, size=m)
    neighbour = scores + gen.uniform(-1.0, 1.0, size=m)
    p = exponential_mechanism_probabilities(scores, budget.epsilon, 1.0)
    q = exponential_mechanism_probabilities(neighbour, budget.epsilon, 1.0)
    return audit_mechanism(p, q)


def _replace_one(gen: np.random.Generator, xs: np.ndarray, low: float, high: float) -> np.ndarray:
    neighbour = xs.copy()
    neighbour[int(gen.integers(xs.shape[0]))] = gen.uniform(low, high)
    return neighbour


def _audit_inverse_sensitivity(gen: np.random.Generator, budget: PrivacyBudget) -> float:
    n = int(gen.integers(1, 41))
    xs = np.round(gen.uniform(-5.0, 5.0, size=n), 1)
    neighbour = _replace_one(gen, xs, -10.0, 10.0)
    grid = np.linspace(-10.0, 10.0, 81)
    p = exponential_mechanism_probabilities(inverse_sensitivity_scores(xs, grid), budget.epsilon)
    q = exponential_mechanism_probabilities(inverse_sensitivity_scores(neighbour, grid), budget.epsilon)
    return audit_mechanism(p, q)


def _audit_private_mom(gen: np.random.Generator, budget: PrivacyBudget, cfg: PrivateMoMConfig) -> float:
    n = 40
    xs = gen.normal(0.0, 1.0, size=(n, 1))
    neighbour = _replace_one(gen, xs[:, 0], -20.0, 20.0).reshape(-1, 1)
    p = private_mom_candidates(xs, budget, cfg)
    q = private_mom_candidates(neighbour, budget, cfg)
    return audit_mechanism(
        exponential_mechanism_probabilities(p.scores, budget.epsilon, p.sensitivity),
        exponential_mechanism_probabilities(q.scores, budget.epsilon, q.sensitivity),
    )


def run_audit(
    mechanism: str,
    epsilon: float,
    instances: int,
    seed: int = 0,
    private_mom_cfg: Optional[PrivateMoMConfig] = None,
) -> AuditSummary:
    """Exact privacy loss over randomized neighbouring pairs.

    Each instance draws a neighbouring pair from RngStream(seed, i), computes
    both output distributions exactly and audits them; losses above
    epsilon + 1e-9 count as violations.
    """
    InputValidator.validate_choice(mechanism, AUDIT_MECHANISMS, "mechanism")
    budget = PrivacyBudget(epsilon)
    instances = InputValidator.validate_integer(instances, 1)
    mom_cfg = private_mom_cfg or PrivateMoMConfig(c1=2.0, c2=1.0)

    worst, violations = 0.0, 0
    for i in range(instances):
        gen = RngStream(seed, i).generator()
        if mechanism == "exponential":
            loss = _audit_exponential(gen, budget)
        elif mechanism == "inverse_sensitivity":
            loss = _audit_inverse_sensitivity(gen, budget)
        else:
            loss = _audit_private_mom(gen, budget, mom_cfg)
        worst = max(worst, loss)
        if loss > epsilon + AUDIT_SLACK:
            violations += 1
    return AuditSummary(mechanism, float(epsilon), instances, worst, violations)
