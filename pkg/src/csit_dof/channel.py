"""Seedable i.i.d. Rayleigh channel draws and small dense complex algebra.

Every draw is addressed by ``(seed, stream_id, domain, attempt, slot)``.
Uniforms come from a Philox counter generator whose key is derived from the
first four fields and whose counter is derived from the slot, so a single
slot can be regenerated on its own and matches the same slot drawn as part
of a block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Singular

SINGULAR_COND = 1e10

_CHANNEL = 0
_NOISE = 1
_U64 = 2**64


@dataclass(frozen=True)
class RngStream:
    """One reproducible random stream; one per Monte Carlo trial."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < _U64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.stream_id) < 0:
            raise ValueError("stream_id must be nonnegative")

    def key(self, domain: int, attempt: int = 0) -> np.ndarray:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id), domain, attempt))
        return ss.generate_state(2, np.uint64)


@dataclass(frozen=True)
class ChannelRealization:
    slot_index: int
    matrix: np.ndarray  # (K, M) complex, row k is user k+1's channel vector

    @property
    def K(self) -> int:
        return self.matrix.shape[0]

    @property
    def M(self) -> int:
        return self.matrix.shape[1]


def _uniform_slots(key, first, count, per_slot):
    """Uniforms in (0, 1] laid out as ``(count, per_slot)``.

    Philox yields four 64-bit words per counter step; each slot owns a
    whole number of steps so its values do not depend on neighbours.
    """
    steps = -(-per_slot // 4)
    gen = np.random.Generator(np.random.Philox(key=key, counter=first * steps))
    u = gen.random((count, 4 * steps))[:, :per_slot]
    return 1.0 - u


def _cn01(u):
    # Box-Muller on (radius, angle) pairs: |h|^2 = -log(u1) ~ Exp(1).
    r = np.sqrt(-np.log(u[..., 0::2]))
    theta = 2.0 * np.pi * u[..., 1::2]
    return r * np.exp(1j * theta)


def sample_channels(rng: RngStream, K: int, M: int, first_slot: int, count: int,
                    attempt: int = 0) -> np.ndarray:
    """Channel matrices for slots ``first_slot .. first_slot+count-1``, shape (count, K, M)."""
    u = _uniform_slots(rng.key(_CHANNEL, attempt), first_slot, count, 2 * K * M)
    return _cn01(u).reshape(count, K, M)


def sample_channel(rng: RngStream, K: int, M: int, slot: int, attempt: int = 0) -> ChannelRealization:
    """Draw the i.i.d. CN(0, 1) channel matrix of one slot.

    ``attempt`` selects an independent redraw of the same slot, used when a
    draw is numerically degenerate and has to be resampled.
    """
    return ChannelRealization(slot, sample_channels(rng, K, M, slot, 1, attempt)[0])


def sample_noise(rng: RngStream, K: int, slot: int = 0) -> np.ndarray:
    """K independent CN(0, 1) noise samples for one slot."""
    u = _uniform_slots(rng.key(_NOISE), slot, 1, 2 * K)
    return _cn01(u)[0]


def condition_number(m) -> float:
    """2-norm condition number; ``inf`` for numerically rank-deficient input."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= s[0] * m.shape[0] * np.finfo(float).eps or s[0] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def invert(m) -> np.ndarray:
    """Inverse by Gauss-Jordan elimination with partial pivoting.

    Raises
    ------
    Singular
        If the condition number exceeds ``SINGULAR_COND``.
    """
    m = np.asarray(m)
    cond = condition_number(m)
    if cond > SINGULAR_COND:
        raise Singular(f"condition number {cond:.3g} exceeds {SINGULAR_COND:.0e}")
    n = m.shape[0]
    dtype = np.result_type(m.dtype, np.float64)
    aug = np.hstack([m.astype(dtype), np.eye(n, dtype=dtype)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] /= aug[col, col]
        others = np.arange(n) != col
        aug[others] -= np.outer(aug[others, col], aug[col])
    return aug[:, n:]
