"""Outer bound on the DoF region under a per-user perfect-CSIT fraction.

For each user k the bound reads

    L * d_k + sum_{j != k} d_j <= L + (min(M, K) - 1) * lam

with L = M (default) or L = min(M, K) (``tightened``).  Nonnegativity and,
by default, the single-antenna box d_k <= 1 are appended.  Weighted sums are
maximised exactly by enumerating every basic solution of the constraint
family.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from . import kernels
from .errors import Infeasible

VERTEX_COND_MAX = 1e10
FEAS_TOL = 1e-9
TIE_TOL = 1e-12
THRESHOLD_SLACK = 1e-12


@dataclass(frozen=True)
class DofPolytope:
    """Polytope ``{d : A d <= b}`` over the DoF vector (d_1, ..., d_K)."""

    K: int
    A: np.ndarray
    b: np.ndarray
    M: int | None = None
    lam: float | None = None
    tightened: bool = False
    box: bool = True
    labels: tuple[str, ...] = field(default=())

    @property
    def inequalities(self) -> list[tuple[tuple[float, ...], float]]:
        return [(tuple(map(float, a)), float(rhs)) for a, rhs in zip(self.A, self.b)]

    def contains(self, d, tol: float = FEAS_TOL) -> bool:
        return bool(np.all(self.A @ np.asarray(d, dtype=float) <= self.b + tol))

    def to_dict(self) -> dict:
        out = {
            "K": self.K,
            "inequalities": [{"a": list(a), "b": rhs} for a, rhs in self.inequalities],
            "box": self.box,
            "tightened": self.tightened,
        }
        if self.M is not None:
            out["M"] = self.M
        if self.lam is not None:
            out["lambda"] = float(self.lam)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> DofPolytope:
        K = int(data["K"])
        rows = data["inequalities"]
        A = np.array([r["a"] for r in rows], dtype=float).reshape(len(rows), K)
        b = np.array([r["b"] for r in rows], dtype=float)
        return cls(K, A, b, M=data.get("M"), lam=data.get("lambda"),
                   tightened=bool(data.get("tightened", False)), box=bool(data.get("box", False)))


@dataclass(frozen=True)
class BoundReport:
    raw_max_sum: float
    capped_max_sum: float
    argmax_point: np.ndarray
    tight_constraints: tuple[int, ...]
    n_vertices: int = 0

    def to_dict(self) -> dict:
        return {
            "raw": self.raw_max_sum,
            "capped": self.capped_max_sum,
            "argmax": [float(v) for v in self.argmax_point],
            "tight": list(self.tight_constraints),
        }


def _check_lambda(lam):
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")


def build_polytope(M: int, K: int, lam, tightened: bool = False, box: bool = True) -> DofPolytope:
    _check_lambda(lam)
    m = min(M, K)
    lead = m if tightened else M
    rhs = lead + (m - 1) * float(lam)
    A = [np.ones(K) + (lead - 1) * np.eye(K)]
    b = [np.full(K, rhs)]
    labels = [f"cyclic[{k + 1}]" for k in range(K)]
    A.append(-np.eye(K))
    b.append(np.zeros(K))
    labels += [f"nonneg[{k + 1}]" for k in range(K)]
    if box:
        A.append(np.eye(K))
        b.append(np.ones(K))
        labels += [f"box[{k + 1}]" for k in range(K)]
    return DofPolytope(K, np.vstack(A), np.concatenate(b), M=M, lam=float(lam),
                       tightened=tightened, box=box, labels=tuple(labels))


def max_weighted(poly: DofPolytope, weights: Sequence[float] | None = None,
                 backend: str | None = None) -> BoundReport:
    """Exact maximum of ``weights . d`` over a bounded polytope.

    ``weights`` defaults to all ones (the sum DoF).  The capped value clips
    the raw optimum at min(M, K) when M is known.
    """
    w = np.ones(poly.K) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (poly.K,) or np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be K nonnegative numbers, not all zero")
    A = np.ascontiguousarray(poly.A, dtype=np.float64)
    b = np.ascontiguousarray(poly.b, dtype=np.float64)
    found, value, point, n_vertices = kernels.vertex_max(
        A, b, np.ascontiguousarray(w), VERTEX_COND_MAX, FEAS_TOL, TIE_TOL, backend=backend)
    if not found:
        raise Infeasible("no feasible vertex")
    point = np.asarray(point, dtype=float)
    tight = tuple(int(i) for i in np.flatnonzero(np.abs(A @ point - b) <= FEAS_TOL))
    capped = value if poly.M is None else min(value, float(min(poly.M, poly.K)))
    return BoundReport(float(value), float(capped), point, tight, int(n_vertices))


def summed_bound(M: int, K: int, lam, tightened: bool = False):
    """Sum of the K cyclic inequalities divided by their common coefficient sum.

    K (L + (min(M,K) - 1) lam) / (L + K - 1) with L = M, or L = min(M, K)
    when ``tightened``.  Exact (``Fraction``) for rational ``lam``, float
    otherwise.
    """
    _check_lambda(lam)
    m = min(M, K)
    lead = m if tightened else M
    if isinstance(lam, Rational):
        return Fraction(K) * (lead + (m - 1) * lam) / (lead + K - 1)
    return K * (lead + (m - 1) * lam) / (lead + K - 1)


def lambda_star(M: int, K: int, exact: bool = False):
    """Smallest per-user perfect-CSIT fraction reaching sum DoF min(M, K)."""
    if M < 1 or K < 1:
        raise ValueError("M and K must be positive")
    m = min(M, K)
    value = Fraction(0) if m == 1 else Fraction(m, K)
    return value if exact else float(value)


def lambda_star_via_lp(M: int, K: int, tol: float = 1e-9, method: str = "summed") -> float:
    """Bisection for the smallest lambda whose outer bound reaches min(M, K).

    ``method="summed"`` evaluates the summed inequality; ``method="lp"``
    solves the boxed LP at every step (slow beyond K of about 5).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = min(M, K)
    if method == "summed":
        def reaches(lam):
            return summed_bound(M, K, lam) >= m - THRESHOLD_SLACK
    elif method == "lp":
        def reaches(lam):
            return max_weighted(build_polytope(M, K, lam)).raw_max_sum >= m - THRESHOLD_SLACK
    else:
        raise ValueError(f"unknown method {method!r}")
    if reaches(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if reaches(mid):
            hi = mid
        else:
            lo = mid
    return hi
