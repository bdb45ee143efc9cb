import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csit_dof.channel import (RngStream, Singular, condition_number, invert, sample_channel,
                              sample_channels, sample_noise)


def test_sample_channel_is_deterministic():
    a = sample_channel(RngStream(7), 2, 2, 0)
    b = sample_channel(RngStream(7), 2, 2, 0)
    assert np.array_equal(a.matrix, b.matrix)
    assert a.slot_index == 0


def test_shape():
    h = sample_channel(RngStream(1), 3, 2, 5)
    assert h.matrix.shape == (3, 2)
    assert (h.K, h.M) == (3, 2)


def test_slots_and_streams_differ():
    s = RngStream(7)
    h0 = sample_channel(s, 2, 2, 0).matrix
    assert not np.array_equal(h0, sample_channel(s, 2, 2, 1).matrix)
    assert not np.array_equal(h0, sample_channel(RngStream(7, 1), 2, 2, 0).matrix)
    assert not np.array_equal(h0, sample_channel(RngStream(8), 2, 2, 0).matrix)
    assert not np.array_equal(h0, sample_channel(s, 2, 2, 0, attempt=1).matrix)


@settings(max_examples=30, deadline=None)
@given(K=st.integers(1, 6), M=st.integers(1, 6), first=st.integers(0, 500), count=st.integers(1, 20))
def test_block_draw_matches_single_slot_draws(K, M, first, count):
    s = RngStream(99, 3)
    block = sample_channels(s, K, M, first, count)
    for i in (0, count - 1):
        assert np.array_equal(block[i], sample_channel(s, K, M, first + i).matrix)


def test_channel_distribution():
    h = sample_channels(RngStream(2024), 1, 1, 0, 100_000).ravel()
    assert abs(h.real.mean()) < 0.02
    assert abs(h.imag.mean()) < 0.02
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)
    assert h.real.var() == pytest.approx(0.5, abs=0.01)
    assert h.imag.var() == pytest.approx(0.5, abs=0.01)
    assert abs(np.mean(h.real * h.imag)) < 0.01


def test_noise():
    s = RngStream(5)
    assert np.array_equal(sample_noise(s, 4), sample_noise(s, 4))
    assert sample_noise(s, 4).shape == (4,)
    draws = np.concatenate([sample_noise(s, 10, slot=t) for t in range(10_000)])
    assert np.var(draws) == pytest.approx(1.0, abs=0.02)
    assert not np.array_equal(sample_noise(s, 2), sample_channel(s, 2, 1, 0).matrix.ravel())


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_bad_seed(seed):
    with pytest.raises(ValueError):
        RngStream(seed)


def test_invert_examples():
    assert np.allclose(invert(np.eye(3)), np.eye(3))
    assert np.allclose(invert(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))


def test_invert_random_3x3(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.max(np.abs(m @ invert(m) - np.eye(3))) <= 1e-9


def test_invert_needs_pivoting():
    m = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.array_equal(invert(m), m)


def test_invert_singular():
    with pytest.raises(Singular):
        invert(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(Singular):
        invert(np.diag([1.0, 1e-11]))


def test_condition_number():
    assert condition_number(np.eye(4)) == 1.0
    assert condition_number(np.diag([10.0, 1.0])) == pytest.approx(10.0)
    assert condition_number(np.array([[1.0, 2.0], [2.0, 4.0]])) == float("inf")
    assert condition_number(np.zeros((2, 2))) == float("inf")
    with pytest.raises(ValueError):
        condition_number(np.ones((2, 3)))


def _matrix_with_condition(rng, n, cond):
    def unitary():
        q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        return q
    s = np.logspace(0, -np.log10(cond), n)
    return unitary() @ np.diag(s) @ unitary()


def test_inversion_residual_over_random_matrices(rng):
    worst = 0.0
    for i in range(1000):
        n = 1 + i % 8
        cond = 10 ** rng.uniform(0, 6)
        m = _matrix_with_condition(rng, n, cond)
        assert condition_number(m) <= 1e6 * (1 + 1e-6)
        worst = max(worst, np.max(np.abs(m @ invert(m) - np.eye(n))))
    assert worst <= 1e-8
