from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csit_dof.errors import BadLength, EmptySchedule, ParseError
from csit_dof.schedule import (CsitSchedule, CsitState, all_n, all_p, audit, cyclic_window,
                               from_file, from_text, lee_heath_block, to_file, truncated_window)


def users_with(s, state, t):
    return {k + 1 for k in range(s.K) if s.rows[k][t] == state}


def test_cyclic_window_m2_k3():
    s = cyclic_window(2, 3, 3)
    assert users_with(s, "P", 0) == {1, 2} and users_with(s, "N", 0) == {3}
    assert users_with(s, "P", 1) == {2, 3} and users_with(s, "N", 1) == {1}
    assert users_with(s, "P", 2) == {3, 1} and users_with(s, "N", 2) == {2}
    assert [s.per_user_fraction(k) for k in range(3)] == [Fraction(2, 3)] * 3
    assert s.to_text() == "PNP\nPPN\nNPP\n"


@pytest.mark.parametrize("K,n", [(1, 1), (3, 6), (4, 12)])
def test_cyclic_window_full(K, n):
    s = cyclic_window(K, K, n)
    assert s.rows == ("P" * n,) * K


def test_cyclic_window_more_antennas_than_users():
    assert cyclic_window(4, 2, 2).rows == ("PP", "PP")


def test_cyclic_window_bad_length():
    with pytest.raises(BadLength):
        cyclic_window(2, 3, 4)
    with pytest.raises(BadLength):
        cyclic_window(2, 3, 0)


@given(M=st.integers(1, 9), K=st.integers(1, 9), blocks=st.integers(1, 5))
def test_cyclic_window_properties(M, K, blocks):
    n = K * blocks
    s = cyclic_window(M, K, n)
    m = min(M, K)
    for t in range(n):
        assert sum(row[t] == "P" for row in s.rows) == m
    for row in s.rows:
        assert set(row) <= {"P", "N"}
    shifts = {s.rows[0][-j:] + s.rows[0][:-j] if j else s.rows[0] for j in range(n)}
    assert all(row in shifts for row in s.rows)
    a = audit(s, Fraction(m, K))
    assert a.passed
    assert a.per_user == (Fraction(m, K),) * K


def test_lee_heath_k3():
    s = lee_heath_block(3, 3)
    assert s.rows == ("DPP",) * 3
    assert audit(s, Fraction(2, 3)).per_user == (Fraction(2, 3),) * 3


def test_lee_heath_k2_n4():
    s = lee_heath_block(2, 4)
    assert s.column(0) == [CsitState.D] * 2
    assert s.column(1) == [CsitState.P] * 2
    assert s.column(2) == [CsitState.D] * 2
    assert s.column(3) == [CsitState.P] * 2
    assert s.per_user_fraction(0) == Fraction(1, 2)


def test_lee_heath_bad_length():
    with pytest.raises(BadLength):
        lee_heath_block(3, 4)


@given(K=st.integers(1, 8), blocks=st.integers(1, 4))
def test_lee_heath_columns_uniform(K, blocks):
    s = lee_heath_block(K, K * blocks)
    for t in range(s.n):
        assert len(set(s.column(t))) == 1
    assert all(s.per_user_fraction(k) == Fraction(K - 1, K) for k in range(K))


def test_truncated_window_widths():
    assert truncated_window(3, 0, 3) == all_n(3, 3)
    assert truncated_window(3, 3, 3) == all_p(3, 3)
    assert truncated_window(3, 1, 3).rows == ("PNN", "NPN", "NNP")
    with pytest.raises(ValueError):
        truncated_window(3, 4, 3)


def test_from_file(tmp_path):
    f = tmp_path / "s.txt"
    f.write_text("PN\nNP\n")
    s = from_file(f)
    assert (s.K, s.n) == (2, 2)
    assert s.state(0, 0) is CsitState.P and s.state(1, 1) is CsitState.P
    assert s.state(0, 1) is CsitState.N


@pytest.mark.parametrize("text", ["PX\nNP\n", "PN\nN\n", "PN\n\nNP\n", "PN\r\nNP\r\n"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        from_text(text)


@pytest.mark.parametrize("text", ["", "\n"])
def test_empty(text):
    with pytest.raises(EmptySchedule):
        from_text(text)


def test_round_trip_bytes(tmp_path):
    src = tmp_path / "a.txt"
    dst = tmp_path / "b.txt"
    src.write_bytes(b"PNP\nPPN\nNPP\n")
    to_file(from_file(src), dst)
    assert dst.read_bytes() == src.read_bytes()


@given(st.lists(st.text(alphabet="PDN", min_size=5, max_size=5), min_size=1, max_size=6))
def test_text_round_trip(rows):
    s = CsitSchedule(tuple(rows))
    assert from_text(s.to_text()) == s


def test_audit():
    s = cyclic_window(2, 3, 3)
    ok = audit(s, 2 / 3)
    assert ok.passed
    assert ok.per_user == (Fraction(2, 3),) * 3
    assert ok.max_fraction == Fraction(2, 3)
    assert not audit(s, 0.5).passed
    z = audit(all_n(4, 7), 0.0)
    assert z.passed and z.per_user == (0,) * 4


def test_audit_counts_only_perfect():
    a = audit(lee_heath_block(3, 3), 2 / 3)
    assert a.passed
    assert a.to_dict()["per_user_exact"] == ["2/3"] * 3
