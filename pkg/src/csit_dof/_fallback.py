"""numpy implementations of the hot loops in ``_kernels.pyx``.

Used when the compiled extension is unavailable or when
``CSIT_DOF_BACKEND=python``.  Results agree with the compiled kernels up to
floating-point summation order.
"""

from itertools import combinations, islice

import numpy as np

_CHUNK = 65536


def _lex_less(x, y, tol):
    for xj, yj in zip(x, y):
        if xj < yj - tol:
            return True
        if xj > yj + tol:
            return False
    return False


def slot_rate_sums(H, served, n_served, precoded, snr, cond_max):
    n, K, M = H.shape
    snr = np.asarray(snr, dtype=float)
    rates = np.zeros((len(snr), K))
    singular = np.zeros(n, dtype=np.uint8)
    precoded = np.asarray(precoded, dtype=bool)

    fb = np.flatnonzero(~precoded)
    if fb.size:
        users = served[fb, 0]
        g = np.abs(H[fb, users, 0]) ** 2
        for p, P in enumerate(snr):
            np.add.at(rates[p], users, np.log2(1.0 + P * g))

    for s in np.unique(n_served[precoded]):
        idx = np.flatnonzero(precoded & (n_served == s))
        users = served[idx, :s]
        hs = H[idx[:, None], users]  # (g, s, M)
        gram = hs @ hs.conj().transpose(0, 2, 1)
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(gram, 1)
        ok = cond <= cond_max
        singular[idx[~ok]] = 1
        if not ok.any():
            continue
        hs, users = hs[ok], users[ok]
        beams = hs.conj().transpose(0, 2, 1) @ np.linalg.inv(gram[ok])
        beams /= np.linalg.norm(beams, axis=1, keepdims=True)
        gain = np.abs(hs @ beams) ** 2  # (g, s, s)
        direct = np.diagonal(gain, axis1=1, axis2=2)
        cross = gain.sum(axis=2) - direct
        for p, P in enumerate(snr):
            pw = P / s
            r = np.log2(1.0 + pw * direct / (1.0 + pw * cross))
            np.add.at(rates[p], users.ravel(), r.ravel())
    return rates, singular


def vertex_max(A, b, w, cond_max, feas_tol, tie_tol):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.asarray(w, dtype=float)
    m_rows, K = A.shape
    found, best_val, best_x, n_vertices = False, 0.0, np.zeros(K), 0
    if K > m_rows:
        return False, float("nan"), best_x, 0
    combos = combinations(range(m_rows), K)
    while True:
        chunk = np.array(list(islice(combos, _CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        T = A[chunk]
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(T, 1)
        ok = cond <= cond_max
        if not ok.any():
            continue
        x = np.linalg.solve(T[ok], b[chunk[ok]][..., None])[..., 0]
        feasible = np.all(x @ A.T <= b + feas_tol, axis=1)
        x = x[feasible]
        vals = x @ w
        n_vertices += len(x)
        for val, xi in zip(vals, x):
            if (not found or val > best_val + tie_tol
                    or (val >= best_val - tie_tol and _lex_less(xi, best_x, tie_tol))):
                found, best_val, best_x = True, float(val), xi.copy()
    return found, best_val, best_x, n_vertices
