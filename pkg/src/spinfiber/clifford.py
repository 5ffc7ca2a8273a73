"""Gamma matrices for a diagonal metric, sigma generators and the Dirac adjoint."""
from dataclasses import dataclass

import numpy as np

from .base_metric import MINKOWSKI, DiagonalMetric
from .errors import PreconditionError

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


def _dirac_basis():
    z = np.zeros((2, 2), dtype=complex)
    one = np.eye(2, dtype=complex)
    g = [np.block([[one, z], [z, -one]])]
    for s in PAULI:
        g.append(np.block([[z, s], [-s, z]]))
    out = np.array(g)
    out.setflags(write=False)
    return out


DIRAC_GAMMAS = _dirac_basis()


@dataclass(frozen=True)
class GammaRep:
    metric: DiagonalMetric
    gammas: np.ndarray  # (4, 4, 4): gammas[k] is gamma^k

    @property
    def conj(self):
        return self.gammas[0]

    def anticommutator_residual(self):
        """max_{n,m} |{g^n, g^m} - 2 d^{nm} I|."""
        g = self.gammas
        prod = np.einsum("nij,mjk->nmik", g, g)
        anti = prod + prod.transpose(1, 0, 2, 3)
        target = 2.0 * np.einsum("nm,ik->nmik", np.diag(self.metric.entries), np.eye(4))
        return float(np.abs(anti - target).max())


def standard_gammas():
    """Dirac representation for the Minkowski metric diag(1,-1,-1,-1)."""
    return GammaRep(MINKOWSKI, DIRAC_GAMMAS)


def deformed_gammas(d):
    """gamma^k(d) = sqrt|d_k| gamma^k_Dirac; requires signs (+,-,-,-)."""
    d.require_lorentzian()
    g = DIRAC_GAMMAS * d.scales[:, None, None]
    g.setflags(write=False)
    return GammaRep(d, g)


def deformed_gammas_batch(log_abs):
    """Gamma stacks for many Lorentzian metrics at once: ``(n, 4) -> (n, 4, 4, 4)``."""
    scales = np.exp(0.5 * np.asarray(log_abs, dtype=float))
    return scales[:, :, None, None] * DIRAC_GAMMAS


def sigma(rep, n, m):
    if not (0 <= n < 4 and 0 <= m < 4):
        raise PreconditionError(f"indices must be in 0..3, got ({n}, {m})")
    g = rep.gammas
    return 0.5j * (g[n] @ g[m] - g[m] @ g[n])


def sigma_all(rep):
    """All sixteen sigma^{nm} as an array of shape (4, 4, 4, 4)."""
    g = rep.gammas
    prod = np.einsum("nij,mjk->nmik", g, g)
    return 0.5j * (prod - prod.transpose(1, 0, 2, 3))


def dirac_adjoint(rep, psi):
    psi = np.asarray(psi, dtype=complex)
    return psi.conj() @ rep.conj


def bilinear(rep, psi):
    """Complex value of psi-bar psi before discarding the (round-off) imaginary part."""
    psi = np.asarray(psi, dtype=complex)
    return np.einsum("...i,ij,...j->...", psi.conj(), rep.conj, psi)


def norm_density(rep, psi):
    """psi-bar psi. Works on a single spinor or a stack ``(..., 4)``."""
    return bilinear(rep, psi).real
