"""Loop-level 4x4 kernels compiled with numba.

Each function also runs unjitted (plain CPython) when numba is absent, but the
batched numpy versions in ``_kernels_np`` are the intended fallback.
"""
import math

import numpy as np

from ._accel import njit

# [6/6] diagonal Pade coefficients of exp
PADE6 = (1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0)
PADE_THETA = 0.5
LOG_RADIUS = 0.25


@njit
def _eye_like(A):
    out = np.zeros_like(A)
    for i in range(A.shape[0]):
        out[i, i] = 1.0
    return out


@njit
def _norm1(A):
    best = 0.0
    for j in range(A.shape[1]):
        s = 0.0
        for i in range(A.shape[0]):
            s += abs(A[i, j])
        if s > best:
            best = s
    return best


@njit
def jacobi_eigh4(S, rtol, max_sweeps):
    """Cyclic Jacobi on a symmetric 4x4. Returns (w, V, sweeps, converged)."""
    a = S.copy()
    v = _eye_like(a)
    fro = 0.0
    for i in range(4):
        for j in range(4):
            fro += a[i, j] * a[i, j]
    thresh = rtol * math.sqrt(fro)
    sweeps = 0
    converged = False
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(3):
            for q in range(p + 1, 4):
                off += 2.0 * a[p, q] * a[p, q]
        if math.sqrt(off) <= thresh:
            converged = True
            break
        if sweep == max_sweeps:
            break
        sweeps += 1
        for p in range(3):
            for q in range(p + 1, 4):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(4):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(4):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(4):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
                a[p, q] = 0.0
                a[q, p] = 0.0
    w = np.empty(4)
    for i in range(4):
        w[i] = a[i, i]
    return w, v, sweeps, converged


@njit
def jacobi_eigh4_batch(S, rtol, max_sweeps):
    n = S.shape[0]
    w = np.empty((n, 4))
    V = np.empty((n, 4, 4))
    sweeps = np.empty(n, dtype=np.int64)
    ok = np.empty(n, dtype=np.bool_)
    for i in range(n):
        wi, vi, si, ci = jacobi_eigh4(np.ascontiguousarray(S[i]), rtol, max_sweeps)
        w[i] = wi
        V[i] = vi
        sweeps[i] = si
        ok[i] = ci
    return w, V, sweeps, ok


@njit
def expm_pade6(A):
    """Scaling and squaring with the [6/6] Pade approximant."""
    nrm = _norm1(A)
    s = 0
    if nrm > PADE_THETA:
        s = int(math.ceil(math.log2(nrm / PADE_THETA)))
    X = A / (2.0 ** s)
    ident = _eye_like(X)
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    even = PADE6[0] * ident + PADE6[2] * X2 + PADE6[4] * X4 + PADE6[6] * X6
    odd = X @ (PADE6[1] * ident + PADE6[3] * X2 + PADE6[5] * X4)
    R = np.ascontiguousarray(np.linalg.solve(even - odd, even + odd))
    for _ in range(s):
        R = R @ R
    return R


@njit
def expm_pade6_batch(A):
    out = np.empty_like(A)
    for i in range(A.shape[0]):
        out[i] = expm_pade6(np.ascontiguousarray(A[i]))
    return out


@njit
def sqrtm_db(A, max_iter):
    """Principal square root by the product-form Denman-Beavers iteration."""
    ident = _eye_like(A)
    M = A.copy()
    Y = A.copy()
    for _ in range(max_iter):
        Minv = np.linalg.inv(M)
        Y = 0.5 * (Y @ (ident + Minv))
        M = 0.5 * (ident + 0.5 * (M + Minv))
        if _norm1(M - ident) <= 1e-15:
            return Y, True
    return Y, False


@njit
def logm_iss(T, max_roots):
    """Principal log by inverse scaling and squaring plus an atanh series.

    Caller is responsible for rejecting eigenvalues on the closed negative
    real axis. Returns (log, number_of_square_roots, ok).
    """
    ident = _eye_like(T)
    X = T.copy()
    k = 0
    while _norm1(X - ident) > LOG_RADIUS:
        if k >= max_roots:
            return X, k, False
        X, ok = sqrtm_db(X, 100)
        if not ok:
            return X, k, False
        k += 1
    Z = np.ascontiguousarray(np.linalg.solve(X + ident, X - ident))
    Z2 = Z @ Z
    P = Z.copy()
    L = Z.copy()
    for j in range(1, 60):
        P = P @ Z2
        term = P / (2.0 * j + 1.0)
        L = L + term
        if _norm1(term) <= 1e-18 * max(_norm1(L), 1e-300):
            break
    return (2.0 * (2.0 ** k)) * L, k, True


@njit
def logm_iss_batch(T, max_roots):
    out = np.empty_like(T)
    roots = np.empty(T.shape[0], dtype=np.int64)
    ok = np.empty(T.shape[0], dtype=np.bool_)
    for i in range(T.shape[0]):
        L, k, good = logm_iss(np.ascontiguousarray(T[i]), max_roots)
        out[i] = L
        roots[i] = k
        ok[i] = good
    return out, roots, ok
