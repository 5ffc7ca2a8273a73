"""Tetrad calculus on a sampled chart.

Array layout: a tetrad is ``(*grid, 4, 4)`` with row k the frame index and
column mu the coordinate index; a spin connection is ``(*grid, 4, 4, 4)``
indexed ``[k, m, nu]``; spinor fields are ``(*grid, 4)`` complex.
"""
from dataclasses import dataclass

import numpy as np

from .base_metric import MINKOWSKI
from .clifford import sigma_all, standard_gammas
from .errors import FlowEscapeError, PreconditionError, SingularFrameError
from .grid import check_field, gradient

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
ORTHONORMAL_TOL = 1e-10
FRAME_COND_MAX = 1e12
MIN_FLOW_STEPS = 100


@dataclass(frozen=True)
class OrthonormalityReport:
    residual: np.ndarray  # per-point max |e g e^T - eta|
    tol: float

    @property
    def max_residual(self):
        return float(self.residual.max())

    @property
    def flagged(self):
        return np.argwhere(self.residual > self.tol)

    @property
    def ok(self):
        return self.max_residual <= self.tol


def check_orthonormality(e, g, grid, tol=ORTHONORMAL_TOL):
    """Compare ``e^k_mu e^m_nu g^{mu nu}`` against eta at every sample."""
    e = check_field(e, grid, (4, 4), "tetrad")
    g = check_field(g, grid, (4, 4), "metric")
    gram = e @ g @ np.swapaxes(e, -1, -2)
    return OrthonormalityReport(np.abs(gram - ETA).max(axis=(-1, -2)), tol)


def frame_inverse(e):
    cond = np.linalg.cond(e)
    if np.any(~np.isfinite(cond) | (cond > FRAME_COND_MAX)):
        raise SingularFrameError("tetrad is singular at some sample")
    return np.linalg.inv(e)


def spin_connection(e, grid, de=None):
    """omega^k_{m nu} = (d_nu e^k_mu) E^mu_m with E the inverse frame.

    ``de`` may supply analytic derivatives, shape ``(4, *grid, 4, 4)`` with the
    derivative index first; otherwise finite differences are used.
    """
    e = check_field(e, grid, (4, 4), "tetrad")
    E = frame_inverse(e)
    if de is None:
        de = gradient(e, grid)
    else:
        de = np.asarray(de, dtype=float)
    return np.einsum("n...kx,...xm->...kmn", de, E)


def connection_term(omega, rep=None):
    """(i/4) omega^k_{m mu} eta_{kn} sigma^{nm}, shape ``(*grid, 4(mu), 4, 4)``."""
    rep = standard_gammas() if rep is None else rep
    if rep.metric != MINKOWSKI:
        raise PreconditionError("the covariant derivative uses the Minkowski gammas")
    lowered = np.einsum("k,...kmu->...kmu", np.diag(ETA), omega)
    return 0.25j * np.einsum("...nmu,nmij->...uij", lowered, sigma_all(rep))


def covariant_derivative(psi, omega, grid, rep=None, dpsi=None):
    """nabla_mu psi = d_mu psi + (i/4) omega^k_{m mu} eta_{kn} sigma^{nm} psi.

    Returns ``(*grid, 4(mu), 4)``. Boundary samples use one-sided stencils.
    """
    psi = check_field(psi, grid, (4,), "spinor field").astype(complex)
    omega = check_field(omega, grid, (4, 4, 4), "spin connection")
    if dpsi is None:
        dpsi = gradient(psi, grid)
    dpsi = np.moveaxis(np.asarray(dpsi), 0, -2)
    return dpsi + np.einsum("...uij,...j->...ui", connection_term(omega, rep), psi)


class VectorField:
    """A vector field zeta^mu(x) given by a callable on points ``(..., 4)``.

    ``jacobian`` (optional) returns ``t^mu_nu = d zeta^mu / d x^nu`` with shape
    ``(..., 4, 4)``; without it, central differences are used.
    """

    def __init__(self, func, jacobian=None, fd_step=1e-6):
        self.func = func
        self._jacobian = jacobian
        self.fd_step = fd_step

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x):
        x = np.asarray(x, dtype=float)
        if self._jacobian is not None:
            return np.asarray(self._jacobian(x), dtype=float)
        cols = []
        for nu in range(4):
            h = self.fd_step * np.maximum(1.0, np.abs(x[..., nu]))[..., None]
            step = np.zeros(4)
            step[nu] = 1.0
            cols.append((self(x + h * step) - self(x - h * step)) / (2 * h))
        return np.stack(cols, axis=-1)

    def sample(self, grid):
        return self(grid.points())

    @classmethod
    def linear(cls, M):
        M = np.asarray(M, dtype=float)
        return cls(lambda x: x @ M.T, lambda x: np.broadcast_to(M, x.shape + (4,)))

    @classmethod
    def constant(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(lambda x: np.broadcast_to(v, x.shape).copy(),
                   lambda x: np.zeros(x.shape + (4,)))


def lie_derivative_tetrad(e, zeta, grid, de=None, dzeta=None):
    """L_zeta e^k_mu = zeta^nu d_nu e^k_mu + e^k_nu d_mu zeta^nu.

    ``zeta`` is a VectorField or samples ``(*grid, 4)``.  Analytic derivatives
    come from ``de`` / ``dzeta`` (same layout as the stencil outputs) or, for
    ``zeta``, from the VectorField's jacobian.
    """
    e = check_field(e, grid, (4, 4), "tetrad")
    if isinstance(zeta, VectorField):
        if dzeta is None:
            dzeta = zeta.jacobian(grid.points())
        zeta = zeta.sample(grid)
    zeta = check_field(zeta, grid, (4,), "vector field")
    if dzeta is None:
        dzeta = np.moveaxis(gradient(zeta, grid), 0, -1)  # [..., nu, mu] = d_mu zeta^nu
    if de is None:
        de = gradient(e, grid)
    transport = np.einsum("...n,n...km->...km", zeta, de)
    return transport + e @ dzeta


def frame_generator(tetrad, zeta, x, tetrad_derivative=None, fd_step=1e-6):
    """zeta^k_m at x: the Lie derivative of the frame expressed in the frame."""
    x = np.asarray(x, dtype=float)
    e = np.asarray(tetrad(x), dtype=float)
    if tetrad_derivative is not None:
        de = np.asarray(tetrad_derivative(x), dtype=float)
    else:
        de = []
        for nu in range(4):
            h = fd_step * max(1.0, abs(x[nu]))
            step = np.zeros(4)
            step[nu] = h
            de.append((np.asarray(tetrad(x + step)) - np.asarray(tetrad(x - step))) / (2 * h))
        de = np.array(de)
    lie = np.einsum("n,nkm->km", zeta(x), de) + e @ zeta.jacobian(x)
    return lie @ np.linalg.inv(e)


def _inside(x, bounds):
    return bounds is None or bool(np.all((x >= bounds[:, 0]) & (x <= bounds[:, 1])))


def flow_exponentiate(zeta, x0, tau, steps=200, bounds=None, tetrad=None, tetrad_derivative=None):
    """Integrate the flow of zeta for parameter time tau with classical RK4.

    Without ``tetrad`` the returned matrix solves ``dA/ds = t(x(s)) A``,
    ``t^mu_nu = d zeta^mu / d x^nu`` (the flow Jacobian).  With a callable
    tetrad ``e(x) -> (4, 4)`` it solves ``dF/ds = zeta^k_m(x(s)) F`` so that
    the frame is carried along the flow.  ``bounds`` is a ChartGrid or a
    ``(4, 2)`` array of coordinate limits.
    Returns ``(x(tau), matrix)``.
    """
    if hasattr(bounds, "axes"):
        bounds = np.array([[ax[0], ax[-1]] for ax in bounds.axes])
    elif bounds is not None:
        bounds = np.asarray(bounds, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    if not _inside(x, bounds):
        raise FlowEscapeError(f"start point {x} outside the chart")
    A = np.eye(4)
    if tau == 0:
        return x, A
    n = max(MIN_FLOW_STEPS, int(steps))
    h = tau / n

    if tetrad is None:
        def gen(y):
            return zeta.jacobian(y)
    else:
        def gen(y):
            return frame_generator(tetrad, zeta, y, tetrad_derivative)

    def rhs(y, B):
        return zeta(y), gen(y) @ B

    for _ in range(n):
        k1x, k1a = rhs(x, A)
        k2x, k2a = rhs(x + 0.5 * h * k1x, A + 0.5 * h * k1a)
        k3x, k3a = rhs(x + 0.5 * h * k2x, A + 0.5 * h * k2a)
        k4x, k4a = rhs(x + h * k3x, A + h * k3a)
        x = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        A = A + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
        if not _inside(x, bounds):
            raise FlowEscapeError(f"flow left the chart at {x}")
    return x, A


def killing_generator_check(zeta, x):
    """Residual of the eta-isometry identity for t^mu_nu at x (flat Killing test)."""
    t = zeta.jacobian(np.asarray(x, dtype=float))
    return float(np.abs(t @ ETA + ETA @ t.T).max())

