"""Per-slot transmit design: who is served, ZF beams, power split, SINR."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelRealization, invert
from .schedule import CsitState


@dataclass(frozen=True)
class PrecodingPlan:
    """Transmit plan of one slot.

    ``beam_matrix`` is M x s with unit-norm columns, column j carrying the
    stream of ``served[j]``.  ``precoded`` is False for the CSIT-free
    fallback, which puts a single stream on antenna 1.
    """

    slot_index: int
    served: tuple[int, ...]
    beam_matrix: np.ndarray
    powers: np.ndarray
    precoded: bool = True


def select_served(states: Sequence[CsitState | str], M: int, rr_counter: int = 0) -> tuple[int, ...]:
    """Users to serve in a slot, as 0-based ids.

    The first min(M, #P) users with perfect CSIT in increasing id order; with
    no perfect CSIT at all, the single user ``rr_counter mod K``.
    """
    perfect = [k for k, s in enumerate(states) if CsitState(s) is CsitState.P]
    if perfect:
        return tuple(perfect[:M])
    return (rr_counter % len(states),)


def zf_beamformer(h: ChannelRealization, served: Sequence[int], P: float) -> PrecodingPlan:
    """Zero-forcing beams from the right pseudo-inverse of the served rows.

    Raises
    ------
    Singular
        If the Gram matrix of the served rows is numerically singular.
    """
    served = tuple(served)
    if not served or len(served) > h.M:
        raise ValueError(f"cannot zero-force {len(served)} streams with {h.M} antennas")
    hs = h.matrix[list(served)]
    beams = hs.conj().T @ invert(hs @ hs.conj().T)
    beams = beams / np.linalg.norm(beams, axis=0)
    return PrecodingPlan(h.slot_index, served, beams, equal_split(P, len(served)))


def equal_split(P: float, s: int) -> np.ndarray:
    """s equal shares whose floating-point sum never exceeds P."""
    powers = np.full(s, P / s)
    while powers.sum() > P:
        powers = np.nextafter(powers, 0.0)
    return powers


def fallback_plan(h: ChannelRealization, user: int, P: float) -> PrecodingPlan:
    """Single stream on antenna 1 at full power; uses no CSIT."""
    beam = np.zeros((h.M, 1), dtype=complex)
    beam[0, 0] = 1.0
    return PrecodingPlan(h.slot_index, (user,), beam, np.array([float(P)]), precoded=False)


def plan_slot(h: ChannelRealization, states, M: int, P: float, rr_counter: int = 0) -> PrecodingPlan:
    served = select_served(states, M, rr_counter)
    if any(CsitState(states[k]) is CsitState.P for k in served):
        return zf_beamformer(h, served, P)
    return fallback_plan(h, served[0], P)


def slot_sinr(h: ChannelRealization, plan: PrecodingPlan) -> np.ndarray:
    """SINR of each served user (same order as ``plan.served``), unit noise."""
    gains = np.abs(h.matrix[list(plan.served)] @ plan.beam_matrix) ** 2
    received = gains * plan.powers[None, :]
    signal = np.diag(received).copy()
    np.fill_diagonal(received, 0.0)
    return signal / (1.0 + received.sum(axis=1))
