"""Batched pure-numpy versions of the 4x4 kernels.

Same algorithms as ``_kernels_jit``, vectorised over a leading batch axis with
per-matrix masks where the iteration counts differ.
"""
import numpy as np

from ._kernels_jit import LOG_RADIUS, PADE6, PADE_THETA

_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
_OFFDIAG = ~np.eye(4, dtype=bool)


def _norm1(A):
    return np.abs(A).sum(axis=-2).max(axis=-1)


def jacobi_eigh4_batch(S, rtol, max_sweeps):
    a = np.array(S, dtype=float)
    n = a.shape[0]
    v = np.broadcast_to(np.eye(4), (n, 4, 4)).copy()
    thresh = rtol * np.sqrt((a * a).sum(axis=(1, 2)))
    sweeps = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt((a[:, _OFFDIAG] ** 2).sum(axis=1))
        active = off > thresh
        if not active.any() or sweep == max_sweeps:
            break
        sweeps += active
        for p, q in _PAIRS:
            apq = a[:, p, q]
            rot = active & (apq != 0.0)
            theta = (a[:, q, q] - a[:, p, p]) / (2.0 * np.where(rot, apq, 1.0))
            with np.errstate(over="ignore"):
                t = 1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta < 0.0, -t, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            c = np.where(rot, c, 1.0)[:, None]
            s = np.where(rot, s, 0.0)[:, None]
            ap, aq = a[:, :, p].copy(), a[:, :, q].copy()
            a[:, :, p] = c * ap - s * aq
            a[:, :, q] = s * ap + c * aq
            ap, aq = a[:, p, :].copy(), a[:, q, :].copy()
            a[:, p, :] = c * ap - s * aq
            a[:, q, :] = s * ap + c * aq
            vp, vq = v[:, :, p].copy(), v[:, :, q].copy()
            v[:, :, p] = c * vp - s * vq
            v[:, :, q] = s * vp + c * vq
            a[rot, p, q] = 0.0
            a[rot, q, p] = 0.0
    w = np.diagonal(a, axis1=1, axis2=2).copy()
    return w, v, sweeps, ~active


def expm_pade6_batch(A):
    A = np.asarray(A)
    nrm = _norm1(A)
    s = np.zeros(A.shape[0], dtype=np.int64)
    big = nrm > PADE_THETA
    s[big] = np.ceil(np.log2(nrm[big] / PADE_THETA)).astype(np.int64)
    X = A / (2.0 ** s)[:, None, None]
    ident = np.broadcast_to(np.eye(4, dtype=A.dtype), X.shape)
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    even = PADE6[0] * ident + PADE6[2] * X2 + PADE6[4] * X4 + PADE6[6] * X6
    odd = X @ (PADE6[1] * ident + PADE6[3] * X2 + PADE6[5] * X4)
    R = np.linalg.solve(even - odd, even + odd)
    for k in range(int(s.max(initial=0))):
        R = np.where((s > k)[:, None, None], R @ R, R)
    return R


def sqrtm_db_batch(A, max_iter=100):
    ident = np.broadcast_to(np.eye(4, dtype=A.dtype), A.shape)
    M = A.copy()
    Y = A.copy()
    live = np.ones(A.shape[0], dtype=bool)
    for _ in range(max_iter):
        if not live.any():
            break
        Minv = np.linalg.inv(M[live])
        Y[live] = 0.5 * (Y[live] @ (ident[live] + Minv))
        M[live] = 0.5 * (ident[live] + 0.5 * (M[live] + Minv))
        live &= _norm1(M - ident) > 1e-15
    return Y, ~live


def logm_iss_batch(T, max_roots):
    X = np.array(T, dtype=float)
    n = X.shape[0]
    ident = np.broadcast_to(np.eye(4), X.shape)
    roots = np.zeros(n, dtype=np.int64)
    ok = np.ones(n, dtype=bool)
    need = _norm1(X - ident) > LOG_RADIUS
    while need.any():
        ok &= ~(need & (roots >= max_roots))
        need &= ok
        if not need.any():
            break
        Xs, good = sqrtm_db_batch(X[need])
        X[need] = Xs
        idx = np.flatnonzero(need)
        ok[idx[~good]] = False
        roots[need] += 1
        need = ok & (_norm1(X - ident) > LOG_RADIUS)
    Z = np.linalg.solve(X + ident, X - ident)
    Z2 = Z @ Z
    P = Z.copy()
    L = Z.copy()
    for j in range(1, 60):
        P = P @ Z2
        term = P / (2.0 * j + 1.0)
        L = L + term
        if np.all(_norm1(term) <= 1e-18 * np.maximum(_norm1(L), 1e-300)):
            break
    return (2.0 * 2.0 ** roots)[:, None, None] * L, roots, ok
