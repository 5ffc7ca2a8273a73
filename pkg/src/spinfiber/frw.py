"""Spatially flat FRW cosmology: tetrad, time-dilatation motion and the
Lie operator on fiber spinor fields."""
import math
from dataclasses import dataclass

import numpy as np

from .base_metric import BaseShift
from .errors import PreconditionError, ScaleFactorError, StencilError
from .fiber import FiberSpinorField, MotionSpec
from .grid import ChartGrid, partial

SPATIAL = np.diag([0.0, 1.0, 1.0, 1.0])


@dataclass(frozen=True)
class ScaleFactor:
    """R(t) = R0 exp(H t), R0 t^p, or the constant R0."""

    kind: str = "exp"
    H: float = 0.0
    p: float = 0.0
    R0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exp", "power", "const"):
            raise PreconditionError(f"unknown scale factor kind {self.kind!r}")
        if self.R0 <= 0:
            raise ScaleFactorError("R0 must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "exp":
            return self.R0 * np.exp(self.H * t)
        if self.kind == "power":
            if np.any(t <= 0):
                raise ScaleFactorError("t^p scale factor needs t > 0")
            return self.R0 * t ** self.p
        return np.full_like(t, self.R0)

    def rate(self, t):
        """Hubble rate Rdot / R."""
        t = np.asarray(t, dtype=float)
        if self.kind == "exp":
            return np.full_like(t, self.H)
        if self.kind == "power":
            return self.p / t
        return np.zeros_like(t)

    def derivative(self, t):
        return self(t) * self.rate(t)

    def log_ratio(self, t1, t2):
        """ln(R(t2) / R(t1)) in closed form."""
        if self.kind == "exp":
            return self.H * (t2 - t1)
        if self.kind == "power":
            if t1 <= 0 or t2 <= 0:
                raise ScaleFactorError("t^p scale factor needs t > 0")
            return self.p * math.log(t2 / t1)
        return 0.0

    def time_for_log_ratio(self, t1, q):
        """The t2 with ln(R(t2)/R(t1)) = q."""
        if self.kind == "exp" and self.H != 0:
            return t1 + q / self.H
        if self.kind == "power" and self.p != 0:
            return t1 * math.exp(q / self.p)
        raise PreconditionError("a static scale factor cannot reach a nonzero log ratio")


def frw_tetrad(R, grid):
    """Tetrad e^0 = dt, e^i = R(t) dx^i and inverse metric diag(1, -R^-2, -R^-2, -R^-2)."""
    t = grid.points()[..., 0]
    Rt = R(t)
    if np.any(Rt <= 0):
        raise ScaleFactorError("R(t) must be positive on the grid")
    e = np.zeros(t.shape + (4, 4))
    g = np.zeros(t.shape + (4, 4))
    e[..., 0, 0] = 1.0
    g[..., 0, 0] = 1.0
    for i in (1, 2, 3):
        e[..., i, i] = Rt
        g[..., i, i] = -1.0 / Rt ** 2
    return e, g


def frw_tetrad_derivative(R, grid):
    """Analytic d_nu e^k_mu, derivative index first."""
    t = grid.points()[..., 0]
    de = np.zeros((4,) + t.shape + (4, 4))
    for i in (1, 2, 3):
        de[0, ..., i, i] = R.derivative(t)
    return de


def frw_generator(R, t1, t2):
    """ln r . diag(0,1,1,1), the generator of the t1 -> t2 dilatation."""
    return R.log_ratio(t1, t2) * SPATIAL


def frw_base_shift(R, t1, t2):
    q = 2.0 * R.log_ratio(t1, t2)
    return BaseShift((0.0, q, q, q))


def frw_motion(R, t1, t2):
    """Time translation by t2 - t1 with frame dilatation diag(1, r, r, r), r = R(t2)/R(t1)."""
    r = math.exp(R.log_ratio(t1, t2))
    return MotionSpec(np.diag([1.0, r, r, r]), shift=(t2 - t1, 0.0, 0.0, 0.0))


def snap_t2(R, t1, t2, spacing):
    """Move t2 so the base shift 2 ln r is a whole number of base steps.

    Returns ``(t2_snapped, steps, snap_distance)``.
    """
    q = 2.0 * R.log_ratio(t1, t2)
    steps = int(round(q / spacing))
    if R.kind == "const" or (R.kind == "exp" and R.H == 0) or (R.kind == "power" and R.p == 0):
        return float(t2), 0, 0.0
    t2s = t1 if steps == 0 else R.time_for_log_ratio(t1, 0.5 * steps * spacing)
    return float(t2s), steps, float(abs(t2s - t2))


def frw_lie_operator(psi):
    """d psi/dt + (d/d ell_1 + d/d ell_2 + d/d ell_3) psi, ell_k = log|d_k|.

    Central differences inside, one-sided second order at the edges.
    """
    n_st = len(psi.spacetime.shape)
    need = [("time", psi.spacetime.shape[0])] + [(f"base axis {k}", psi.base.shape[k]) for k in (1, 2, 3)]
    for name, n in need:
        if n < 3:
            raise StencilError(f"{name} has {n} samples; the operator needs at least 3")
    base_grid = ChartGrid(psi.base.origin, psi.base.spacing, psi.base.shape)
    out = partial(psi.values, psi.spacetime, 0)
    for k in (1, 2, 3):
        out = out + partial(psi.values, base_grid, k, offset=n_st)
    return FiberSpinorField(psi.spacetime, psi.base, out)
