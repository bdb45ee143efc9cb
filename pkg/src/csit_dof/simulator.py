"""Monte Carlo rates of a CSIT schedule over an SNR grid and the DoF slope fit.

Each trial owns one ``RngStream(seed, trial)`` and draws a fresh channel per
slot; the same draws are reused at every SNR point (common random numbers),
so the slope across the grid is not polluted by independent sampling noise.
Per-trial sums are reduced in trial order, which makes serial and parallel
runs bit-identical.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .channel import SINGULAR_COND, RngStream, sample_channels
from .errors import DegenerateGrid, Singular
from .precoding import select_served
from .schedule import CsitSchedule, CsitState, FractionAudit, audit

log = logging.getLogger(__name__)

DEFAULT_SNR_DB = (30.0, 40.0, 50.0, 60.0)
SLOT_BLOCK = 4096
MAX_RESAMPLES = 64


@dataclass(frozen=True)
class SnrGrid:
    """Transmit powers P (linear, unit noise), strictly increasing."""

    points: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise DegenerateGrid("an SNR grid needs at least two points")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValueError("SNR points must be strictly increasing")
        if self.points[0] <= 0:
            raise ValueError("SNR points must be positive")

    @classmethod
    def from_db(cls, snr_db: Sequence[float]) -> SnrGrid:
        return cls(tuple(10.0 ** (float(x) / 10.0) for x in snr_db))

    @property
    def db(self) -> tuple[float, ...]:
        return tuple(10.0 * math.log10(p) for p in self.points)


@dataclass(frozen=True)
class SnrPoint:
    snr_db: float
    P: float
    rates: tuple[float, ...]
    sum_rate: float


@dataclass
class SimReport:
    per_snr: list[SnrPoint]
    dof_slope: float
    slope_stderr: float
    per_user_slopes: tuple[float, ...]
    schedule_audit: FractionAudit
    streams_per_slot: float
    resampled_slots: int
    config_echo: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config_echo,
            "audit": self.schedule_audit.to_dict(),
            "per_snr": [{"snr_db": p.snr_db, "rates": list(p.rates), "sum": p.sum_rate}
                        for p in self.per_snr],
            "dof_slope": self.dof_slope,
            "slope_stderr": self.slope_stderr,
            "per_user_slopes": list(self.per_user_slopes),
            "streams_per_slot": self.streams_per_slot,
            "resampled_slots": self.resampled_slots,
        }


def fit_slope(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """OLS slope of y on x and its standard error.

    The standard error is 0 for two points (no residual degrees of freedom).
    """
    if len(points) < 2:
        raise DegenerateGrid("slope fit needs at least two points")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateGrid("slope fit needs distinct abscissae")
    slope = float(dx @ (y - y.mean())) / sxx
    if len(x) == 2:
        return slope, 0.0
    resid = y - y.mean() - slope * dx
    return slope, math.sqrt(float(resid @ resid) / (len(x) - 2) / sxx)


@dataclass(frozen=True)
class SlotPlan:
    """Who is served in every slot of a schedule, independent of the channel."""

    served: np.ndarray  # (n, S) int64, padded with -1
    n_served: np.ndarray  # (n,) int64
    precoded: np.ndarray  # (n,) uint8


def plan_schedule(schedule: CsitSchedule, M: int) -> SlotPlan:
    n, S = schedule.n, min(M, schedule.K)
    served = np.full((n, S), -1, dtype=np.int64)
    n_served = np.zeros(n, dtype=np.int64)
    precoded = np.zeros(n, dtype=np.uint8)
    rr = 0
    for t in range(n):
        states = schedule.column(t)
        users = select_served(states, M, rr)
        if states[users[0]] is CsitState.P:
            precoded[t] = 1
        else:
            rr += 1
        served[t, :len(users)] = users
        n_served[t] = len(users)
    return SlotPlan(served, n_served, precoded)


def _trial_rate_sums(plan: SlotPlan, K: int, M: int, snr: np.ndarray, seed: int, trial: int,
                     backend: str | None) -> tuple[np.ndarray, int]:
    """Per-(SNR, user) sum of slot rates over the whole schedule for one trial."""
    rng = RngStream(seed, trial)
    n = len(plan.n_served)
    total = np.zeros((len(snr), K))
    resampled = 0
    for start in range(0, n, SLOT_BLOCK):
        stop = min(n, start + SLOT_BLOCK)
        sl = slice(start, stop)
        H = sample_channels(rng, K, M, start, stop - start)
        rates, singular = kernels.slot_rate_sums(
            H, plan.served[sl], plan.n_served[sl], plan.precoded[sl], snr, SINGULAR_COND,
            backend=backend)
        total += rates
        bad = np.flatnonzero(singular) + start
        attempt = 0
        while bad.size:
            attempt += 1
            if attempt > MAX_RESAMPLES:
                raise Singular(f"slots {bad.tolist()} stayed singular after {MAX_RESAMPLES} redraws")
            resampled += bad.size
            H = np.stack([sample_channels(rng, K, M, int(t), 1, attempt)[0] for t in bad])
            rates, singular = kernels.slot_rate_sums(
                H, plan.served[bad], plan.n_served[bad], plan.precoded[bad], snr, SINGULAR_COND,
                backend=backend)
            total += rates
            bad = bad[singular.astype(bool)]
    return total, resampled


def _trial_job(args):
    return _trial_rate_sums(*args)


def simulate(schedule: CsitSchedule, M: int, grid: SnrGrid | Sequence[float], trials: int,
             seed: int, lambda_cap: float | None = None, workers: int = 1,
             backend: str | None = None) -> SimReport:
    """Average per-user rates of ZF-over-schedule transmission and the sum-DoF slope.

    ``grid`` is an :class:`SnrGrid` or a sequence of SNR values in dB.
    ``lambda_cap`` only sets the cap recorded in the audit (default: the
    schedule's own maximum fraction).  ``workers > 1`` spreads trials over
    processes without changing the result.
    """
    if not isinstance(grid, SnrGrid):
        grid = SnrGrid.from_db(grid)
    if trials < 1:
        raise ValueError("trials must be positive")
    if M < 1:
        raise ValueError("M must be positive")
    K, n = schedule.K, schedule.n
    snr = np.array(grid.points, dtype=float)
    plan = plan_schedule(schedule, M)
    backend = backend or kernels.BACKEND
    jobs = [(plan, K, M, snr, seed, trial, backend) for trial in range(trials)]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_job, jobs))
    else:
        results = [_trial_job(job) for job in jobs]

    total = np.zeros((len(snr), K))
    resampled = 0
    for rates, r in results:
        total += rates
        resampled += r
    if resampled:
        log.info("resampled %d numerically singular slots", resampled)
    avg = total / (n * trials)

    per_snr = [SnrPoint(db, float(P), tuple(float(v) for v in row), float(row.sum()))
               for db, P, row in zip(grid.db, grid.points, avg)]
    log2p = np.log2(snr)
    slope, stderr = fit_slope(list(zip(log2p, avg.sum(axis=1))))
    user_slopes = tuple(fit_slope(list(zip(log2p, avg[:, k])))[0] for k in range(K))
    cap = lambda_cap
    if cap is None:
        cap = float(max(schedule.per_user_fraction(k) for k in range(K)))
    echo = {"M": M, "K": K, "slots": n, "trials": trials, "seed": int(seed),
            "snr_db": list(grid.db)}
    return SimReport(per_snr, slope, stderr, user_slopes, audit(schedule, cap),
                     float(plan.n_served.mean()), resampled, echo)
