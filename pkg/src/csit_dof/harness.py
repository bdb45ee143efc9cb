"""Experiment configuration, single runs, lambda sweeps and their outputs."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import schedule as sched
from .bounds import BoundReport, build_polytope, lambda_star, max_weighted, summed_bound
from .errors import AuditFailure, ConfigError
from .simulator import DEFAULT_SNR_DB, SimReport, simulate

SEED_ENV = "CSIT_DOF_SEED"
GENERATED = ("cyclic_window", "lee_heath", "all_p", "all_n")
SLOPE_SLACK = 0.05


@dataclass
class BoundsConfig:
    tightened: bool = False
    box: bool = True


@dataclass
class ExperimentConfig:
    M: int = 2
    K: int = 3
    schedule: str = "cyclic_window"
    lambda_cap: float | None = None
    snr_db: list[float] = field(default_factory=lambda: list(DEFAULT_SNR_DB))
    slots: int | None = None
    trials: int = 10
    seed: int = 0
    bounds: BoundsConfig = field(default_factory=BoundsConfig)
    output: str = "out"
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.bounds, dict):
            self.bounds = BoundsConfig(**self.bounds)
        if self.slots is None:
            self.slots = 1000 * self.K if isinstance(self.K, int) and self.K > 0 else None

    def validate(self) -> ExperimentConfig:
        for name in ("M", "K", "trials", "workers"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.slots, int) or self.slots < 1:
            raise ConfigError(f"slots must be a positive integer, got {self.slots!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if len(self.snr_db) < 2:
            raise ConfigError("snr_db needs at least two points for a slope fit")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("snr_db must be strictly increasing")
        if self.lambda_cap is not None and not 0 <= self.lambda_cap <= 1:
            raise ConfigError(f"lambda_cap must lie in [0, 1], got {self.lambda_cap}")
        if self.schedule in GENERATED:
            if self.slots % self.K:
                raise ConfigError(f"slots={self.slots} must be a multiple of K={self.K}")
        elif not self.schedule.startswith("file:"):
            raise ConfigError(f"unknown schedule {self.schedule!r}; expected one of "
                              f"{', '.join(GENERATED)} or file:<path>")
        return self

    def canonical(self) -> dict:
        """Fields that determine the result; output location and worker count excluded."""
        return {
            "M": self.M, "K": self.K, "schedule": self.schedule,
            "lambda_cap": self.lambda_cap, "snr_db": [float(x) for x in self.snr_db],
            "slots": self.slots, "trials": self.trials, "seed": self.seed,
            "bounds": dataclasses.asdict(self.bounds),
        }


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None,
                environ: dict | None = None) -> ExperimentConfig:
    """Defaults, then the JSON file, then ``CSIT_DOF_SEED``, then ``overrides``."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV):
        try:
            data["seed"] = int(environ[SEED_ENV])
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer") from exc
    bounds = dict(data.pop("bounds", {}) or {})
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("tightened", "box"):
            bounds[key] = value
        else:
            data[key] = value
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = ExperimentConfig(**data, bounds=BoundsConfig(**bounds))
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def build_schedule(cfg: ExperimentConfig) -> sched.CsitSchedule:
    kind, K, n = cfg.schedule, cfg.K, cfg.slots
    if kind == "cyclic_window":
        return sched.cyclic_window(cfg.M, K, n)
    if kind == "lee_heath":
        return sched.lee_heath_block(K, n)
    if kind == "all_p":
        return sched.all_p(K, n)
    if kind == "all_n":
        return sched.all_n(K, n)
    try:
        s = sched.from_file(kind[len("file:"):])
    except OSError as exc:
        raise ConfigError(f"cannot read schedule file: {exc}") from exc
    if s.K != K:
        raise ConfigError(f"schedule file has {s.K} users but K={K}")
    return s


def bound_summary(M: int, K: int, lam: float, tightened: bool = False, box: bool = True) -> dict:
    report = max_weighted(build_polytope(M, K, lam, tightened=tightened, box=box))
    return {
        "lambda": float(lam),
        "raw": report.raw_max_sum,
        "capped": report.capped_max_sum,
        "summed_bound": float(summed_bound(M, K, lam, tightened=tightened)),
        "lambda_star": lambda_star(M, K),
        "argmax": [float(v) for v in report.argmax_point],
    }


def dumps_canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


@dataclass
class RunResult:
    report: SimReport
    bound: BoundReport
    payload: dict

    def to_json(self) -> str:
        return dumps_canonical(self.payload)


def run(cfg: ExperimentConfig, write: bool = True) -> RunResult:
    """Simulate the configured schedule and bound the DoF at the same lambda.

    Raises
    ------
    AuditFailure
        If the schedule requests perfect CSIT more often than ``lambda_cap``.
    """
    cfg.validate()
    schedule = build_schedule(cfg)
    cap = cfg.lambda_cap
    if cap is None:
        cap = float(max(schedule.per_user_fraction(k) for k in range(schedule.K)))
    check = sched.audit(schedule, cap)
    if not check.passed:
        raise AuditFailure(check)
    report = simulate(schedule, cfg.M, cfg.snr_db, cfg.trials, cfg.seed,
                      lambda_cap=cap, workers=cfg.workers)
    bound = max_weighted(build_polytope(cfg.M, cfg.K, cap, cfg.bounds.tightened, cfg.bounds.box))
    payload = report.to_dict()
    payload["config"] = cfg.canonical()
    payload["bound"] = {
        "lambda": float(cap),
        "raw": bound.raw_max_sum,
        "capped": bound.capped_max_sum,
        "lambda_star": lambda_star(cfg.M, cfg.K),
        "argmax": [float(v) for v in bound.argmax_point],
    }
    result = RunResult(report, bound, payload)
    if write:
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(result.to_json())
        write_rates_csv(report, out / "rates.csv")
    return result


def write_rates_csv(report: SimReport, path: str | os.PathLike) -> None:
    K = len(report.per_snr[0].rates)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["snr_db"] + [f"user_{k + 1}" for k in range(K)] + ["sum"])
        for p in report.per_snr:
            w.writerow([repr(p.snr_db)] + [repr(r) for r in p.rates] + [repr(p.sum_rate)])


@dataclass(frozen=True)
class SweepRow:
    lam: float
    achieved_slope: float | None
    outer_bound_capped: float
    outer_bound_raw: float
    schedule_name: str | None
    heuristic: bool


@dataclass
class SweepResult:
    M: int
    K: int
    rows: list[SweepRow]

    def violations(self, slack: float = SLOPE_SLACK) -> list[SweepRow]:
        return [r for r in self.rows
                if r.achieved_slope is not None and r.achieved_slope > r.outer_bound_capped + slack]

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lambda", "achieved_slope", "outer_bound_capped", "outer_bound_raw",
                        "schedule", "heuristic"])
            for r in self.rows:
                w.writerow([repr(r.lam), "" if r.achieved_slope is None else repr(r.achieved_slope),
                            repr(r.outer_bound_capped), repr(r.outer_bound_raw),
                            r.schedule_name or "", str(r.heuristic).lower()])

    def to_dict(self) -> dict:
        return {"M": self.M, "K": self.K, "rows": [dataclasses.asdict(r) for r in self.rows]}


def parse_lambda(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad lambda value {text!r}") from exc


def sweep_lambda(M: int, K: int, lambdas: Sequence[float], sim_on: bool = True,
                 cfg: ExperimentConfig | None = None) -> SweepResult:
    """Outer bound, and where a rotating window fits, the simulated slope, per lambda.

    A lambda that is a multiple of 1/K is simulated with a window of
    ``round(lambda * K)`` users; windows other than min(M, K) wide are
    marked heuristic.
    """
    if not lambdas:
        raise ConfigError("lambda sweep needs at least one value")
    cfg = cfg or ExperimentConfig(M=M, K=K)
    if cfg.slots is None or cfg.slots % K:
        raise ConfigError(f"slots must be a multiple of K={K}")
    rows = []
    for lam in lambdas:
        if not 0 <= lam <= 1:
            raise ConfigError(f"lambda {lam} outside [0, 1]")
        bound = max_weighted(build_polytope(M, K, lam, cfg.bounds.tightened, cfg.bounds.box))
        slope, name, heuristic = None, None, False
        width = round(lam * K)
        if sim_on and math.isclose(lam * K, width, abs_tol=1e-9):
            s = sched.truncated_window(K, width, cfg.slots)
            name = "all_n" if width == 0 else f"window_{width}"
            if width == min(M, K):
                name = "cyclic_window"
            heuristic = width != min(M, K)
            slope = simulate(s, M, cfg.snr_db, cfg.trials, cfg.seed,
                             lambda_cap=lam, workers=cfg.workers).dof_slope
        rows.append(SweepRow(float(lam), slope, bound.capped_max_sum, bound.raw_max_sum,
                             name, heuristic))
    return SweepResult(M, K, rows)
