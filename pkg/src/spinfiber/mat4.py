"""Dense 4x4 kernels: symmetric eigendecomposition, exp, principal log.

The hot loops live in ``_kernels_jit`` (numba) and ``_kernels_np`` (batched
numpy); ``SPINFIBER_NUMBA=0`` selects the numpy path.  Everything here takes
and returns plain ``numpy.ndarray`` objects.
"""
from dataclasses import dataclass

import numpy as np

from . import _accel, _kernels_jit, _kernels_np
from .errors import BranchCutError, ConvergenceError, PreconditionError, SingularTransformError

SYM_RTOL = 1e-12
JACOBI_RTOL = 1e-14
JACOBI_MAX_SWEEPS = 50
LOG_MAX_ROOTS = 64
# |Im(lambda)| below this fraction of |lambda| counts as a real eigenvalue
BRANCH_CUT_RTOL = 1e-12
SINGULAR_COND = 1e14
# eigenvalues within this fraction of max|w| are treated as degenerate
EIG_TIE_RTOL = 1e-12


def _backend(use_numba):
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    return _kernels_jit if use_numba else _kernels_np


@dataclass(frozen=True)
class EigSym4:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def as_real4(A, name="matrix"):
    A = np.asarray(A, dtype=float)
    if A.shape != (4, 4):
        raise PreconditionError(f"{name} must be 4x4, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise PreconditionError(f"{name} has non-finite entries")
    return A


def canonicalize_eig(w, V, tie_rtol=None):
    """Sort eigenpairs by descending eigenvalue and fix column signs.

    Eigenvalues closer than ``tie_rtol * max|w|`` count as equal and keep
    the Jacobi order, so round-off never permutes a degenerate cluster.
    Each column is then flipped so its largest-magnitude entry (first one on
    ties) is positive; if the result has det -1, column 3 is flipped as well.
    Works on batches ``w: (n, 4)``, ``V: (n, 4, 4)``.
    """
    tie_rtol = EIG_TIE_RTOL if tie_rtol is None else tie_rtol
    w = np.array(w, dtype=float)
    V = np.array(V, dtype=float)
    tol = tie_rtol * np.abs(w).max(axis=1)
    rows = np.arange(w.shape[0])
    for _ in range(3):
        for k in range(3):
            swap = w[:, k + 1] > w[:, k] + tol
            if swap.any():
                r = rows[swap]
                w[r, k], w[r, k + 1] = w[r, k + 1], w[r, k].copy()
                V[r, :, k], V[r, :, k + 1] = V[r, :, k + 1], V[r, :, k].copy()
    lead = np.argmax(np.abs(V), axis=1)
    sgn = np.sign(np.take_along_axis(V, lead[:, None, :], axis=1))
    sgn[sgn == 0] = 1.0
    V = V * sgn
    flip = np.linalg.det(V) < 0
    V[flip, :, 3] *= -1.0
    return w, V


def eig_sym4_batch(S, use_numba=None):
    S = np.ascontiguousarray(S, dtype=float)
    if S.ndim != 3 or S.shape[1:] != (4, 4):
        raise PreconditionError(f"expected shape (n, 4, 4), got {S.shape}")
    asym = np.sqrt(((S - S.transpose(0, 2, 1)) ** 2).sum(axis=(1, 2)))
    scale = np.sqrt((S * S).sum(axis=(1, 2)))
    if np.any(asym > SYM_RTOL * scale):
        raise PreconditionError("input is not symmetric within tolerance")
    S = np.ascontiguousarray(0.5 * (S + S.transpose(0, 2, 1)))
    w, V, _, ok = _backend(use_numba).jacobi_eigh4_batch(S, JACOBI_RTOL, JACOBI_MAX_SWEEPS)
    if not np.all(ok):
        raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return canonicalize_eig(w, V)


def eig_sym4(S, use_numba=None):
    """Eigendecomposition ``S = V diag(w) V^T`` of a real symmetric 4x4.

    Eigenvalues come back in descending order (for a Lorentzian matrix: the
    positive one first, then the negatives by ascending magnitude) and V is
    a proper rotation with sign-canonical columns.
    """
    S = as_real4(S, "S")
    w, V = eig_sym4_batch(S[None], use_numba)
    return EigSym4(w[0], V[0])


def mat_exp_batch(A, use_numba=None):
    A = np.asarray(A)
    dtype = complex if np.iscomplexobj(A) else float
    A = np.ascontiguousarray(A, dtype=dtype)
    return _backend(use_numba).expm_pade6_batch(A)


def mat_exp(A, use_numba=None):
    """Matrix exponential of a real or complex square matrix."""
    A = np.asarray(A)
    dtype = complex if np.iscomplexobj(A) else float
    A = np.ascontiguousarray(A, dtype=dtype)
    if not np.all(np.isfinite(A)):
        raise PreconditionError("non-finite entries")
    if _accel.USE_NUMBA if use_numba is None else use_numba:
        return _kernels_jit.expm_pade6(A)
    return _kernels_np.expm_pade6_batch(A[None])[0]


def branch_cut_mask(T):
    """True where a batch member has an eigenvalue on the closed negative real axis."""
    ev = np.linalg.eigvals(T)
    mag = np.abs(ev)
    on_axis = (np.abs(ev.imag) <= BRANCH_CUT_RTOL * mag) & (ev.real <= 0.0)
    return np.any(on_axis | (mag == 0.0), axis=-1)


def has_principal_log(T):
    return not bool(branch_cut_mask(np.asarray(T, dtype=float)))


def mat_log_batch(T, use_numba=None):
    T = np.ascontiguousarray(T, dtype=float)
    bad = branch_cut_mask(T)
    if np.any(bad):
        raise BranchCutError(
            f"{int(bad.sum())} matrix(es) have an eigenvalue on the closed negative real axis")
    L, _, ok = _backend(use_numba).logm_iss_batch(T, LOG_MAX_ROOTS)
    if not np.all(ok):
        raise ConvergenceError("square-root iteration failed in matrix logarithm")
    return L


def mat_log(T, use_numba=None):
    """Principal logarithm of a real 4x4 matrix.

    Raises BranchCutError when T has a real eigenvalue <= 0; such a T lies
    outside the identity component reachable by one exponential.
    """
    T = as_real4(T, "T")
    return mat_log_batch(T[None], use_numba)[0]


def inv4(A):
    A = np.asarray(A)
    if np.linalg.cond(A) > SINGULAR_COND:
        raise SingularTransformError("matrix is singular to working precision")
    return np.linalg.inv(A)


def det4(A):
    return float(np.linalg.det(np.asarray(A, dtype=float)))
