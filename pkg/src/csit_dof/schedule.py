"""Per-user, per-slot CSIT availability grids.

A schedule is a K x n grid over {P, D, N}: perfect, delayed or no CSIT from
user k at slot t.  Users and slots are 0-based in code and 1-based in files
and reports.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadLength, EmptySchedule, ParseError

AUDIT_SLACK = 1e-12


class CsitState(str, enum.Enum):
    P = "P"
    D = "D"
    N = "N"


_VALID = frozenset("PDN")


@dataclass(frozen=True)
class CsitSchedule:
    rows: tuple[str, ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise EmptySchedule("schedule needs at least one user and one slot")
        n = len(self.rows[0])
        for k, row in enumerate(self.rows):
            if len(row) != n:
                raise ParseError(f"row {k + 1} has {len(row)} slots, expected {n}")
            bad = set(row) - _VALID
            if bad:
                raise ParseError(f"row {k + 1}: invalid CSIT state(s) {sorted(bad)!r}")

    @property
    def K(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def state(self, k: int, t: int) -> CsitState:
        return CsitState(self.rows[k][t])

    def column(self, t: int) -> list[CsitState]:
        return [CsitState(row[t]) for row in self.rows]

    def perfect_mask(self) -> np.ndarray:
        """Boolean (K, n) array, True where the state is P."""
        return np.array([[c == "P" for c in row] for row in self.rows], dtype=bool)

    def per_user_fraction(self, k: int) -> Fraction:
        return Fraction(self.rows[k].count("P"), self.n)

    def to_text(self) -> str:
        return "".join(row + "\n" for row in self.rows)


@dataclass(frozen=True)
class FractionAudit:
    per_user: tuple[Fraction, ...]
    max_fraction: Fraction
    lambda_cap: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "per_user": [float(f) for f in self.per_user],
            "per_user_exact": [f"{f.numerator}/{f.denominator}" for f in self.per_user],
            "max_fraction": float(self.max_fraction),
            "lambda_cap": float(self.lambda_cap),
            "passed": self.passed,
        }


def _check_length(n: int, block: int) -> None:
    if n <= 0 or n % block:
        raise BadLength(f"n={n} must be a positive multiple of {block}")


def truncated_window(K: int, width: int, n: int) -> CsitSchedule:
    """Perfect CSIT from a width-``width`` window of users rotated one user per slot.

    Slot t (0-based) has users ``(t + j) mod K`` for ``j < width`` in state P,
    all others in state N.  ``width = 0`` gives the all-N schedule.
    """
    if K < 1:
        raise ValueError("K must be positive")
    if not 0 <= width <= K:
        raise ValueError(f"window width {width} outside [0, {K}]")
    _check_length(n, K)
    t = np.arange(n)
    offset = (np.arange(K)[:, None] - t[None, :]) % K
    perfect = offset < width
    return CsitSchedule(tuple("".join("P" if p else "N" for p in row) for row in perfect))


def cyclic_window(M: int, K: int, n: int) -> CsitSchedule:
    """The min(M, K)-wide rotating window: every user is P for min(M, K)/K of slots."""
    if M < 1:
        raise ValueError("M must be positive")
    return truncated_window(K, min(M, K), n)


def lee_heath_block(K: int, n: int) -> CsitSchedule:
    """Blocks of K slots: one all-D slot followed by K-1 all-P slots."""
    if K < 1:
        raise ValueError("K must be positive")
    _check_length(n, K)
    row = "".join("D" if t % K == 0 else "P" for t in range(n))
    return CsitSchedule((row,) * K)


def uniform(K: int, n: int, state: CsitState | str) -> CsitSchedule:
    return CsitSchedule((CsitState(state).value * n,) * K)


def all_p(K: int, n: int) -> CsitSchedule:
    return uniform(K, n, CsitState.P)


def all_n(K: int, n: int) -> CsitSchedule:
    return uniform(K, n, CsitState.N)


def from_text(text: str) -> CsitSchedule:
    if not text:
        raise EmptySchedule("empty schedule file")
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    if not lines:
        raise EmptySchedule("empty schedule file")
    return CsitSchedule(tuple(lines))


def from_file(path: str | os.PathLike) -> CsitSchedule:
    with open(path, "r", encoding="ascii", newline="") as fh:
        try:
            text = fh.read()
        except UnicodeDecodeError as exc:
            raise ParseError(f"{path}: non-ASCII content") from exc
    return from_text(text)


def to_file(schedule: CsitSchedule, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(schedule.to_text())


def audit(schedule: CsitSchedule, lambda_cap: float) -> FractionAudit:
    """Count perfect-CSIT slots per user exactly and compare with the cap."""
    per_user = tuple(schedule.per_user_fraction(k) for k in range(schedule.K))
    worst = max(per_user)
    passed = all(float(f) <= float(lambda_cap) + AUDIT_SLACK for f in per_user)
    return FractionAudit(per_user, worst, lambda_cap, passed)
