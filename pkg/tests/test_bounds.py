from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from csit_dof.bounds import (DofPolytope, build_polytope, lambda_star, lambda_star_via_lp,
                             max_weighted, summed_bound)
from csit_dof.errors import Infeasible

LAMBDAS = [0, 0.25, 0.5, 0.75, 1]


def highs_max(poly, w):
    res = linprog(-np.asarray(w, float), A_ub=poly.A, b_ub=poly.b, bounds=(None, None),
                  method="highs")
    assert res.status == 0
    return -res.fun


def test_polytope_m2_k3():
    poly = build_polytope(2, 3, 2 / 3)
    cyc = poly.inequalities[:3]
    assert cyc[0][0] == (2.0, 1.0, 1.0)
    assert cyc[1][0] == (1.0, 2.0, 1.0)
    assert cyc[2][0] == (1.0, 1.0, 2.0)
    assert all(rhs == pytest.approx(8 / 3) for _, rhs in cyc)
    assert len(poly.inequalities) == 9
    assert poly.contains(np.zeros(3))
    tight = build_polytope(2, 3, 2 / 3, tightened=True)
    assert np.array_equal(tight.A, poly.A) and np.array_equal(tight.b, poly.b)


def test_polytope_tightened_m4_k2():
    loose = build_polytope(4, 2, 1)
    tight = build_polytope(4, 2, 1, tightened=True)
    assert loose.inequalities[0] == ((4.0, 1.0), 5.0)
    assert tight.inequalities[0] == ((2.0, 1.0), 3.0)


def test_polytope_without_box():
    assert len(build_polytope(3, 3, 0.5, box=False).inequalities) == 6
    with pytest.raises(ValueError):
        build_polytope(2, 2, 1.5)


def test_max_weighted_examples():
    r = max_weighted(build_polytope(2, 3, Fraction(2, 3)))
    assert r.raw_max_sum == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(r.argmax_point, 2 / 3)
    assert r.tight_constraints == (0, 1, 2)

    r = max_weighted(build_polytope(2, 3, 0))
    assert r.raw_max_sum == pytest.approx(1.5, abs=1e-12)
    assert np.allclose(r.argmax_point, 0.5)

    r = max_weighted(build_polytope(2, 3, 1))
    assert r.raw_max_sum == pytest.approx(2.25, abs=1e-12)
    assert r.capped_max_sum == 2.0
    assert np.allclose(r.argmax_point, 0.75)


def test_max_weighted_rejects_bad_weights():
    poly = build_polytope(2, 2, 0.5)
    with pytest.raises(ValueError):
        max_weighted(poly, [0, 0])
    with pytest.raises(ValueError):
        max_weighted(poly, [1, -1])


def test_infeasible_from_dict():
    poly = DofPolytope.from_dict({"K": 1, "inequalities": [{"a": [1], "b": -1}, {"a": [-1], "b": 0}]})
    with pytest.raises(Infeasible):
        max_weighted(poly)


def test_json_round_trip():
    poly = build_polytope(3, 4, 0.5, tightened=True)
    again = DofPolytope.from_dict(poly.to_dict())
    assert np.array_equal(again.A, poly.A) and np.array_equal(again.b, poly.b)
    assert again.tightened and again.box and again.K == 4
    import json
    data = json.loads(poly.to_json())
    assert set(data) >= {"K", "inequalities", "box", "tightened"}
    assert data["inequalities"][0] == {"a": [3.0, 1.0, 1.0, 1.0], "b": 3.0 + 2 * 0.5}


def test_summed_bound_values():
    assert summed_bound(2, 3, Fraction(2, 3)) == 2
    assert summed_bound(2, 3, 2 / 3) == 2.0
    assert summed_bound(2, 2, 1) == 2
    assert summed_bound(3, 3, 0.5) == pytest.approx(2.4, abs=1e-15)
    assert summed_bound(4, 2, 1, tightened=True) == 2


@pytest.mark.parametrize("M", range(1, 7))
@pytest.mark.parametrize("K", range(1, 7))
def test_vertex_enumeration_matches_highs(M, K):
    rng = np.random.default_rng(M * 10 + K)
    for lam in (0, 0.5, 1):
        for box in (True, False):
            poly = build_polytope(M, K, lam, box=box)
            for w in (np.ones(K), rng.uniform(0, 1, K)):
                assert max_weighted(poly, w).raw_max_sum == pytest.approx(highs_max(poly, w), abs=1e-9)


@pytest.mark.parametrize("M", range(1, 7))
@pytest.mark.parametrize("K", range(1, 7))
def test_symmetric_optimum(M, K):
    for lam in LAMBDAS:
        sym = (M + (min(M, K) - 1) * lam) / (M + K - 1)
        r = max_weighted(build_polytope(M, K, lam))
        assert sym <= 1
        assert r.raw_max_sum == pytest.approx(K * sym, abs=1e-9)
        assert r.raw_max_sum == pytest.approx(float(summed_bound(M, K, lam)), abs=1e-9)
        point = np.full(K, sym)
        assert build_polytope(M, K, lam).contains(point)
        if M > 1:
            # (M-1) I + J is nonsingular: the optimum is the unique symmetric vertex
            assert np.allclose(r.argmax_point, sym, atol=1e-9)


@pytest.mark.parametrize("M,K", [(2, 3), (3, 5), (5, 2), (4, 4)])
def test_monotone_in_lambda(M, K):
    values = [max_weighted(build_polytope(M, K, lam)).raw_max_sum for lam in np.linspace(0, 1, 11)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


@settings(max_examples=40, deadline=None)
@given(M=st.integers(1, 5), K=st.integers(2, 5), lam=st.floats(0, 1), tightened=st.booleans(),
       data=st.data())
def test_permutation_invariance(M, K, lam, tightened, data):
    w = np.array(data.draw(st.lists(st.integers(1, 20), min_size=K, max_size=K)), dtype=float)
    perm = np.array(data.draw(st.permutations(range(K))))
    poly = build_polytope(M, K, lam, tightened=tightened)
    a = max_weighted(poly, w)
    b = max_weighted(poly, w[perm])
    assert b.raw_max_sum == pytest.approx(a.raw_max_sum, abs=1e-9)
    assert poly.contains(a.argmax_point)
    # the permuted point is optimal for the permuted weights
    assert w[perm] @ a.argmax_point[perm] == pytest.approx(b.raw_max_sum, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(M=st.integers(1, 6), K=st.integers(1, 6), lam=st.floats(0, 1), box=st.booleans())
def test_tightened_never_looser(M, K, lam, box):
    loose = max_weighted(build_polytope(M, K, lam, box=box)).raw_max_sum
    tight = max_weighted(build_polytope(M, K, lam, tightened=True, box=box)).raw_max_sum
    assert tight <= loose + 1e-9


def test_capped_never_exceeds_min():
    for M, K in [(2, 3), (5, 2), (3, 3)]:
        for lam in LAMBDAS:
            r = max_weighted(build_polytope(M, K, lam))
            assert r.capped_max_sum <= min(M, K)
            assert build_polytope(M, K, lam).contains(r.argmax_point)


def test_lambda_star_examples():
    assert lambda_star(2, 3) == 2 / 3
    assert lambda_star(2, 3, exact=True) == Fraction(2, 3)
    assert lambda_star(1, 5) == 0
    assert lambda_star(3, 3) == 1
    assert lambda_star(6, 4) == 1


@pytest.mark.parametrize("M,K,expected", [(2, 3, 2 / 3), (4, 2, 1.0), (1, 4, 0.0), (3, 7, 3 / 7)])
def test_lambda_star_via_lp(M, K, expected):
    assert lambda_star_via_lp(M, K, tol=1e-9) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("M,K", [(2, 3), (3, 4), (2, 2), (4, 3)])
def test_lambda_star_by_bisection_on_lp(M, K):
    got = lambda_star_via_lp(M, K, tol=1e-7, method="lp")
    assert got == pytest.approx(lambda_star(M, K), abs=1e-7)


@pytest.mark.parametrize("M", range(2, 9))
@pytest.mark.parametrize("K", range(2, 9))
def test_threshold(M, K):
    star = lambda_star(M, K)
    m = min(M, K)
    for lam in sorted({star - 1e-6, star, min(1.0, star + 0.05)}):
        if not 0 <= lam <= 1:
            continue
        capped = max_weighted(build_polytope(M, K, lam)).capped_max_sum
        reached = capped >= m - 1e-9
        assert reached == (lam >= star - 1e-12), (lam, capped)
