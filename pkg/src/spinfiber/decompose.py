"""Factor T in GL(4,R) as V . Delta . U relative to a diagonal base metric.

``V`` is the proper orthogonal matrix diagonalising ``T diag(d) T^T``,
``Delta`` the positive diagonal dilatation taking ``d`` to the diagonal form
``d'``, and ``U = Delta^-1 V^-1 T`` an isometry of ``d``.
"""
from dataclasses import dataclass

import numpy as np

from . import mat4
from .base_metric import BaseShift, DiagonalMetric, congruence, shift
from .errors import BranchCutError, SignatureError, SingularTransformError


@dataclass(frozen=True)
class IsometryFactorization:
    V: np.ndarray
    Delta: np.ndarray
    U: np.ndarray
    source: DiagonalMetric
    target: DiagonalMetric
    baseShift: BaseShift

    def reconstruct(self):
        return self.V @ self.Delta @ self.U

    def residuals(self, T=None):
        """Named residuals of the factorization identities (absolute, max-norm)."""
        d = self.source.matrix()
        dp = self.target.matrix()
        out = {
            "right_isometry": float(np.abs(self.U @ d @ self.U.T - d).max()),
            "orthogonality": float(np.abs(self.V @ self.V.T - np.eye(4)).max()),
            "det_V": float(abs(np.linalg.det(self.V) - 1.0)),
            "dilatation": float(np.abs(self.Delta @ d @ self.Delta - dp).max()),
        }
        if T is not None:
            out["reconstruction"] = float(np.abs(self.reconstruct() - T).max())
            out["diagonalization"] = float(np.abs(self.V @ dp @ self.V.T - congruence(self.source, T)).max())
        return out


def _check_source(d):
    if not d.is_lorentzian:
        raise SignatureError(f"factorization needs a (+,-,-,-) base point, got signs {d.signs}")


def _assemble(T, d, w, V):
    ratio = w / d.entries
    if np.any(ratio <= 0.0):
        # cannot happen for invertible T (Sylvester); guards rounding on near-singular input
        raise SignatureError("congruence changed the signature")
    delta_diag = np.sqrt(ratio)
    U = (V.T @ T) / delta_diag[:, None]
    log_ratio = np.log(ratio)
    bshift = BaseShift(tuple(log_ratio))
    return IsometryFactorization(V=V, Delta=np.diag(delta_diag), U=U, source=d,
                                 target=shift(d, bshift), baseShift=bshift)


def factorize(T, d, use_numba=None):
    """Split ``T`` into left isometry, dilatation and right isometry at base point ``d``."""
    T = mat4.as_real4(T, "T")
    _check_source(d)
    if np.linalg.cond(T) > mat4.SINGULAR_COND:
        raise SingularTransformError("T is singular to working precision")
    if not mat4.has_principal_log(T):
        raise BranchCutError("transformation lies outside the identity-component domain")
    eig = mat4.eig_sym4(congruence(d, T), use_numba)
    return _assemble(T, d, eig.eigenvalues, eig.eigenvectors)


def factorize_batch(T, metrics, use_numba=None):
    """Vectorised ``factorize`` over ``T: (n, 4, 4)`` and a sequence of n metrics."""
    T = np.asarray(T, dtype=float)
    for d in metrics:
        _check_source(d)
    if np.any(np.linalg.cond(T) > mat4.SINGULAR_COND):
        raise SingularTransformError("some T is singular to working precision")
    bad = mat4.branch_cut_mask(T)
    if np.any(bad):
        raise BranchCutError(f"{int(bad.sum())} transformation(s) outside the identity component")
    dvec = np.array([d.entries for d in metrics])
    S = np.einsum("nij,nj,nkj->nik", T, dvec, T)
    w, V = mat4.eig_sym4_batch(0.5 * (S + S.transpose(0, 2, 1)), use_numba)
    return [_assemble(T[i], metrics[i], w[i], V[i]) for i in range(len(metrics))]


def exponential_parts(f, use_numba=None):
    """Generators with ``exp(v_gen)=V``, ``exp(diag(delta_gen))=Delta``, ``exp(u_gen)=U``."""
    v_gen = mat4.mat_log(f.V, use_numba)
    u_gen = mat4.mat_log(f.U, use_numba)
    delta_gen = 0.5 * f.baseShift.as_array()
    return v_gen, delta_gen, u_gen
