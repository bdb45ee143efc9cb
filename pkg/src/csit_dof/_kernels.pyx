# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: batched ZF slot rates and LP vertex enumeration.

Semantics match ``csit_dof._fallback`` exactly; only the floating-point
summation order differs.
"""

import numpy as np

from libc.math cimport fabs, log2, sqrt


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def slot_rate_sums(double complex[:, :, ::1] H, long[:, ::1] served, long[::1] n_served,
                   unsigned char[::1] precoded, double[::1] snr, double cond_max):
    """Sum over slots of log2(1 + SINR) per (SNR point, user).

    Returns ``(rates, singular)``; slots flagged singular contribute nothing.
    """
    cdef Py_ssize_t n = H.shape[0], K = H.shape[1], M = H.shape[2]
    cdef Py_ssize_t n_snr = snr.shape[0], S = served.shape[1]
    rates_arr = np.zeros((n_snr, K), dtype=np.float64)
    singular_arr = np.zeros(n, dtype=np.uint8)
    cdef double[:, ::1] rates = rates_arr
    cdef unsigned char[::1] singular = singular_arr
    cdef double complex[:, ::1] G = np.zeros((S, S), dtype=np.complex128)
    cdef double complex[:, ::1] Gi = np.zeros((S, S), dtype=np.complex128)
    cdef double complex[:, ::1] B = np.zeros((M, S), dtype=np.complex128)
    cdef double[:, ::1] gain = np.zeros((S, S), dtype=np.float64)
    cdef Py_ssize_t i, a, c, r, m, p, s, k, piv
    cdef double best, v, colsum, norm_g, norm_gi, pw, intf, g
    cdef double complex z, f
    cdef bint bad

    with nogil:
        for i in range(n):
            s = n_served[i]
            if not precoded[i]:
                k = served[i, 0]
                g = cabs2(H[i, k, 0])
                for p in range(n_snr):
                    rates[p, k] += log2(1.0 + snr[p] * g)
                continue

            for a in range(s):
                for c in range(s):
                    z = 0
                    for m in range(M):
                        z = z + H[i, served[i, a], m] * H[i, served[i, c], m].conjugate()
                    G[a, c] = z
                    Gi[a, c] = 1.0 if a == c else 0.0
            norm_g = 0.0
            for c in range(s):
                colsum = 0.0
                for a in range(s):
                    colsum += sqrt(cabs2(G[a, c]))
                if colsum > norm_g:
                    norm_g = colsum

            # Gauss-Jordan with partial pivoting; G is destroyed.
            bad = False
            for c in range(s):
                piv = c
                best = cabs2(G[c, c])
                for r in range(c + 1, s):
                    v = cabs2(G[r, c])
                    if v > best:
                        best = v
                        piv = r
                if best == 0.0:
                    bad = True
                    break
                if piv != c:
                    for m in range(s):
                        z = G[c, m]; G[c, m] = G[piv, m]; G[piv, m] = z
                        z = Gi[c, m]; Gi[c, m] = Gi[piv, m]; Gi[piv, m] = z
                f = 1.0 / G[c, c]
                for m in range(s):
                    G[c, m] = G[c, m] * f
                    Gi[c, m] = Gi[c, m] * f
                for r in range(s):
                    if r != c:
                        f = G[r, c]
                        for m in range(s):
                            G[r, m] = G[r, m] - f * G[c, m]
                            Gi[r, m] = Gi[r, m] - f * Gi[c, m]
            if not bad:
                norm_gi = 0.0
                for c in range(s):
                    colsum = 0.0
                    for a in range(s):
                        colsum += sqrt(cabs2(Gi[a, c]))
                    if colsum > norm_gi:
                        norm_gi = colsum
                if not norm_g * norm_gi <= cond_max:
                    bad = True
            if bad:
                singular[i] = 1
                continue

            for c in range(s):
                v = 0.0
                for m in range(M):
                    z = 0
                    for a in range(s):
                        z = z + H[i, served[i, a], m].conjugate() * Gi[a, c]
                    B[m, c] = z
                    v += cabs2(z)
                v = sqrt(v)
                for m in range(M):
                    B[m, c] = B[m, c] / v
            for a in range(s):
                for c in range(s):
                    z = 0
                    for m in range(M):
                        z = z + H[i, served[i, a], m] * B[m, c]
                    gain[a, c] = cabs2(z)
            for p in range(n_snr):
                pw = snr[p] / s
                for a in range(s):
                    intf = 0.0
                    for c in range(s):
                        if c != a:
                            intf += pw * gain[a, c]
                    rates[p, served[i, a]] += log2(1.0 + pw * gain[a, a] / (1.0 + intf))
    return rates_arr, singular_arr


cdef inline bint lex_less(double[::1] x, double[::1] y, Py_ssize_t K, double tol) nogil:
    cdef Py_ssize_t j
    for j in range(K):
        if x[j] < y[j] - tol:
            return True
        if x[j] > y[j] + tol:
            return False
    return False


def vertex_max(double[:, ::1] A, double[::1] b, double[::1] w, double cond_max,
               double feas_tol, double tie_tol):
    """Maximise w.x over {A x <= b} by visiting every K-subset of constraints.

    Returns ``(found, value, point, n_vertices)`` where ``n_vertices`` counts
    feasible basic solutions (with multiplicity).
    """
    cdef Py_ssize_t m_rows = A.shape[0], K = A.shape[1]
    cdef double[:, ::1] T = np.zeros((K, K), dtype=np.float64)
    cdef double[:, ::1] Ti = np.zeros((K, K), dtype=np.float64)
    cdef double[::1] x = np.zeros(K, dtype=np.float64)
    best_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] best_x = best_arr
    cdef long[::1] idx = np.arange(K, dtype=np.int64)
    cdef Py_ssize_t a, c, r, j, piv
    cdef double bestp, v, f, colsum, norm_t, norm_ti, val, lhs
    cdef double best_val = 0.0
    cdef bint found = False, bad, feasible
    cdef long n_vertices = 0

    if K > m_rows:
        return False, float("nan"), best_arr, 0
    with nogil:
        while True:
            for a in range(K):
                for c in range(K):
                    T[a, c] = A[idx[a], c]
                    Ti[a, c] = 1.0 if a == c else 0.0
            norm_t = 0.0
            for c in range(K):
                colsum = 0.0
                for a in range(K):
                    colsum += fabs(T[a, c])
                if colsum > norm_t:
                    norm_t = colsum
            bad = False
            for c in range(K):
                piv = c
                bestp = fabs(T[c, c])
                for r in range(c + 1, K):
                    v = fabs(T[r, c])
                    if v > bestp:
                        bestp = v
                        piv = r
                if bestp == 0.0:
                    bad = True
                    break
                if piv != c:
                    for j in range(K):
                        v = T[c, j]; T[c, j] = T[piv, j]; T[piv, j] = v
                        v = Ti[c, j]; Ti[c, j] = Ti[piv, j]; Ti[piv, j] = v
                f = 1.0 / T[c, c]
                for j in range(K):
                    T[c, j] *= f
                    Ti[c, j] *= f
                for r in range(K):
                    if r != c:
                        f = T[r, c]
                        if f != 0.0:
                            for j in range(K):
                                T[r, j] -= f * T[c, j]
                                Ti[r, j] -= f * Ti[c, j]
            if not bad:
                norm_ti = 0.0
                for c in range(K):
                    colsum = 0.0
                    for a in range(K):
                        colsum += fabs(Ti[a, c])
                    if colsum > norm_ti:
                        norm_ti = colsum
                if not norm_t * norm_ti <= cond_max:
                    bad = True
            if not bad:
                for a in range(K):
                    v = 0.0
                    for c in range(K):
                        v += Ti[a, c] * b[idx[c]]
                    x[a] = v
                feasible = True
                for r in range(m_rows):
                    lhs = 0.0
                    for j in range(K):
                        lhs += A[r, j] * x[j]
                    if lhs > b[r] + feas_tol:
                        feasible = False
                        break
                if feasible:
                    n_vertices += 1
                    val = 0.0
                    for j in range(K):
                        val += w[j] * x[j]
                    if (not found or val > best_val + tie_tol
                            or (val >= best_val - tie_tol and lex_less(x, best_x, K, tie_tol))):
                        found = True
                        best_val = val
                        for j in range(K):
                            best_x[j] = x[j]

            # next K-combination of range(m_rows) in lexicographic order
            a = K - 1
            while a >= 0 and idx[a] == m_rows - K + a:
                a -= 1
            if a < 0:
                break
            idx[a] += 1
            for j in range(a + 1, K):
                idx[j] = idx[j - 1] + 1
    return found, best_val, best_arr, n_vertices
