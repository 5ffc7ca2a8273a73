"""Lift isometries of a diagonal metric to spinor space.

Convention: the lift S of an isometry L satisfies

    S gamma^m S^-1 = (L^-1)^m_n gamma^n,

equivalently ``[Sigma(lam), gamma^m] = -lam^m_n gamma^n`` for generators.
"""
from dataclasses import dataclass

import numpy as np

from . import mat4
from .base_metric import MINKOWSKI, DiagonalMetric
from .clifford import deformed_gammas, sigma_all
from .errors import NotAnIsometryError, NotAnIsometryGeneratorError

GENERATOR_RTOL = 1e-10
ISOMETRY_RTOL = 1e-10


def generator_residual(lam, d):
    """Relative size of ``lam diag(d) + diag(d) lam^T``."""
    lam = np.asarray(lam, dtype=float)
    D = d.entries
    res = np.abs(lam * D + (lam * D).T).max()
    return float(res / (max(1.0, np.abs(lam).max()) * np.abs(D).max()))


def isometry_residual(L, d):
    L = np.asarray(L, dtype=float)
    D = d.matrix()
    return float(np.abs(L @ D @ L.T - D).max() / np.abs(d.entries).max())


@dataclass(frozen=True)
class IsometryGenerator:
    matrix: np.ndarray
    metric: DiagonalMetric

    def __post_init__(self):
        lam = mat4.as_real4(self.matrix, "generator")
        if generator_residual(lam, self.metric) > GENERATOR_RTOL:
            raise NotAnIsometryGeneratorError("lam diag(d) + diag(d) lam^T != 0")
        object.__setattr__(self, "matrix", lam)

    @property
    def raised(self):
        """lam^{mn} = lam^m_k d^{kn}, antisymmetric."""
        return self.matrix * self.metric.entries

    @classmethod
    def from_antisymmetric(cls, A, d):
        """The generator with raised form A (A must be antisymmetric)."""
        A = np.asarray(A, dtype=float)
        return cls(A * d.inverse_entries(), d)


@dataclass(frozen=True)
class SpinLift:
    matrix: np.ndarray
    metric: DiagonalMetric


def rotation_generator(i, j):
    """Generator of rotations in the spatial (i, j) plane, i, j in 1..3."""
    lam = np.zeros((4, 4))
    lam[i, j] = -1.0
    lam[j, i] = 1.0
    return lam


def boost_generator(i):
    """Generator of Minkowski boosts along spatial axis i (rapidity 1)."""
    lam = np.zeros((4, 4))
    lam[0, i] = 1.0
    lam[i, 0] = 1.0
    return lam


def lift_generator(lam, d=None, check=True):
    """Spinor generator (i/4) lam^k_m d_{kn} sigma^{mn}(d).

    ``lam`` is an IsometryGenerator, or a raw matrix together with metric d.
    ``check=False`` skips the isometry-generator test; the result then has no
    intertwining guarantee (used for the orthogonal diagonaliser V).
    """
    if isinstance(lam, IsometryGenerator):
        d, lam = lam.metric, lam.matrix
    else:
        d = MINKOWSKI if d is None else d
        lam = IsometryGenerator(lam, d).matrix if check else mat4.as_real4(lam, "generator")
    lowered = lam * d.inverse_entries()[:, None]  # d_{kk} lam^k_m
    sig = sigma_all(deformed_gammas(d))
    return 0.25j * np.einsum("nm,mnij->ij", lowered, sig)


def spin_exp(lam, d=None, use_numba=None, check=True):
    """exp of the lifted generator; reaches the whole double cover (2 pi -> -I)."""
    return mat4.mat_exp(lift_generator(lam, d, check), use_numba)


def lift_orthogonal(V, d, use_numba=None):
    """Lift an orthogonal V with the sigma(d) generators, exp(Sigma(log V)).

    V is in general not an isometry of d; only when it is does the result
    intertwine the gammas.
    """
    lam = mat4.mat_log(V, use_numba)
    return SpinLift(spin_exp(lam, d, use_numba, check=False), d)


def lift_isometry(L, d, use_numba=None):
    """Spin lift of an identity-component isometry ``L`` of ``diag(d)``."""
    L = mat4.as_real4(L, "L")
    if isometry_residual(L, d) > ISOMETRY_RTOL:
        raise NotAnIsometryError("L diag(d) L^T != diag(d)")
    lam = mat4.mat_log(L, use_numba)
    # the log of an isometry is a generator up to round-off; project it back
    lam = 0.5 * (lam - d.entries[:, None] * lam.T * d.inverse_entries()[None, :])
    return SpinLift(spin_exp(IsometryGenerator(lam, d), use_numba=use_numba), d)


def intertwining_residual(S, L, d):
    """max_m |S gamma^m S^-1 - (L^-1)^m_n gamma^n|."""
    g = deformed_gammas(d).gammas
    S = np.asarray(S)
    lhs = np.einsum("ij,mjk,kl->mil", S, g, np.linalg.inv(S))
    rhs = np.einsum("mn,nil->mil", np.linalg.inv(L), g)
    return float(np.abs(lhs - rhs).max())
