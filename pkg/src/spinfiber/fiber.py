"""Spinor fields over spacetime x base metrics and their transport.

A ``FiberSpinorField`` stores ``values[*spacetime, *base, 4]``.  The base is a
uniform lattice in the log chart of diagonal (+,-,-,-) metrics.  Transport
under a motion T is the composition

    left lift of V  o  base translation by delta  o  right lift of U

with ``T = V Delta U`` factorised at a reference base point.  Translations
are restricted to whole lattice steps so they are exact permutations.
"""
import math
from dataclasses import dataclass, field
from dataclasses import replace as dc_replace

import numpy as np

from . import decompose
from .base_metric import LORENTZ_SIGNS, BaseShift, DiagonalMetric
from .clifford import DIRAC_GAMMAS
from .errors import AlignmentError, PreconditionError, SupportError
from .grid import ChartGrid
from .spinlift import lift_isometry, lift_orthogonal

ALIGN_RTOL = 1e-9
SHIFT_UNIFORM_TOL = 1e-12


@dataclass(frozen=True)
class BaseGrid:
    """Lattice ``log|d_k| = origin_k + spacing_k * i_k`` with fixed signs."""

    origin: tuple
    spacing: tuple
    shape: tuple
    signs: tuple = LORENTZ_SIGNS

    def __post_init__(self):
        g = ChartGrid(self.origin, self.spacing, self.shape)  # reuse validation
        object.__setattr__(self, "origin", g.origin)
        object.__setattr__(self, "spacing", g.spacing)
        object.__setattr__(self, "shape", g.shape)
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        if self.signs != LORENTZ_SIGNS:
            raise PreconditionError("base grids carry the (+,-,-,-) signature")

    @classmethod
    def from_axes(cls, axes, signs=LORENTZ_SIGNS, spacing=None):
        g = ChartGrid.from_axes(axes, spacing)
        return cls(g.origin, g.spacing, g.shape, tuple(signs))

    @classmethod
    def centered(cls, center, spacing, half_widths):
        """Grid with ``2*w+1`` samples per axis around ``center`` (a DiagonalMetric)."""
        origin = tuple(c - s * w for c, s, w in zip(center.log_abs, spacing, half_widths))
        return cls(origin, tuple(spacing), tuple(2 * w + 1 for w in half_widths), center.signs)

    @property
    def axes(self):
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.shape)]

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def log_abs_points(self):
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def metric_at(self, index):
        return DiagonalMetric(self.signs, tuple(o + h * i for o, h, i in zip(self.origin, self.spacing, index)))

    def lattice_offset(self, delta):
        """Integer lattice steps for a base shift; AlignmentError if off-lattice."""
        delta = delta.as_array() if isinstance(delta, BaseShift) else np.asarray(delta, dtype=float)
        steps = delta / np.array(self.spacing)
        k = np.rint(steps)
        if np.any(np.abs(steps - k) > ALIGN_RTOL * np.maximum(1.0, np.abs(steps))):
            raise AlignmentError(f"base shift {delta} is not a whole number of lattice steps {self.spacing}")
        return tuple(int(x) for x in k)

    def index_of(self, d):
        if d.signs != self.signs:
            return None
        try:
            k = self.lattice_offset(np.array(d.log_abs) - np.array(self.origin))
        except AlignmentError:
            return None
        if any(i < 0 or i >= n for i, n in zip(k, self.shape)):
            return None
        return k


def _inner_mask(shape, w):
    inner = np.zeros(shape, dtype=bool)
    # singleton base axes never shift, so they carry no layer
    inner[tuple(slice(None) if n == 1 else slice(w, n - w) for n in shape)] = True
    return inner


@dataclass(frozen=True)
class FiberSpinorField:
    spacetime: ChartGrid
    base: BaseGrid
    values: np.ndarray
    boundary_width: int = field(default=0)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        want = tuple(self.spacetime.shape) + tuple(self.base.shape) + (4,)
        if vals.shape != want:
            raise PreconditionError(f"field values have shape {vals.shape}, expected {want}")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("field values must be finite")
        w = int(self.boundary_width)
        if w > 0:
            if np.any(vals[..., ~_inner_mask(self.base.shape, w), :] != 0):
                raise SupportError(f"field is nonzero inside the declared boundary layer of width {w}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, spacetime, base, boundary_width=0):
        return cls(spacetime, base, np.zeros(tuple(spacetime.shape) + tuple(base.shape) + (4,)), boundary_width)

    @classmethod
    def from_function(cls, spacetime, base, func, boundary_width=0):
        """``func(x, ell)`` with x ``(..., 4)`` chart points and ell ``(..., 4)`` log-chart points."""
        x = spacetime.points()[(Ellipsis,) + (None,) * 4 + (slice(None),)]
        ell = base.log_abs_points()[(None,) * 4]
        x, ell = np.broadcast_arrays(x, ell)
        return cls(spacetime, base, func(x, ell), boundary_width)

    def replace(self, values=None, spacetime=None):
        return FiberSpinorField(self.spacetime if spacetime is None else spacetime, self.base,
                                self.values if values is None else values, self.boundary_width)

    def __add__(self, other):
        return self.replace(self.values + other.values)

    def __mul__(self, a):
        return self.replace(a * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True)
class MotionSpec:
    """A spacetime motion and its frame transformation.

    ``frame`` is a constant 4x4 matrix or a callable ``points (..., 4) ->
    (..., 4, 4)``.  The spacetime map is the translation ``x -> x + shift``
    unless ``point_map`` (a callable on points) is given, in which case it
    must permute the field's sample grid.
    """

    frame: object
    shift: tuple = (0.0, 0.0, 0.0, 0.0)
    point_map: object = None

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    @property
    def uniform(self):
        return not callable(self.frame)

    def frame_at(self, points):
        if self.uniform:
            return np.broadcast_to(np.asarray(self.frame, dtype=float), points.shape[:-1] + (4, 4))
        return np.asarray(self.frame(points), dtype=float)

    def apply(self, points):
        if self.point_map is not None:
            return np.asarray(self.point_map(points), dtype=float)
        return points + np.asarray(self.shift, dtype=float)


def _base_mask(psi, base_mask):
    if base_mask is None:
        return np.ones(psi.base.shape, dtype=bool)
    base_mask = np.asarray(base_mask, dtype=bool)
    if base_mask.shape != psi.base.shape:
        raise PreconditionError("base mask must match the base grid shape")
    return base_mask


def _require_on_grid(psi, d, what):
    if psi.base.index_of(d) is None:
        raise AlignmentError(f"{what} {d.log_abs} is not a point of the base grid")


def _apply_spin(psi, S, base_mask):
    """Multiply every sample in the masked base region by S (4x4 or per-spacetime-point stack)."""
    S = np.asarray(S, dtype=complex)
    vals = psi.values.copy()
    sel = _base_mask(psi, base_mask)
    if S.ndim == 2:
        vals[..., sel, :] = vals[..., sel, :] @ S.T
    else:
        n_st = len(psi.spacetime.shape)
        flat = S.reshape((-1, 4, 4))
        vals_st = vals.reshape((flat.shape[0],) + vals.shape[n_st:])
        for i, Si in enumerate(flat):
            vals_st[i][sel] = vals_st[i][sel] @ Si.T
    return psi.replace(vals)


def _lifts(fs, lift):
    if isinstance(fs, decompose.IsometryFactorization):
        return lift(fs)
    fs = np.asarray(fs, dtype=object)
    return np.array([lift(f) for f in fs.ravel()]).reshape(fs.shape + (4, 4))


def _first(fs):
    return fs if isinstance(fs, decompose.IsometryFactorization) else np.asarray(fs, dtype=object).ravel()[0]


def step_right_isometry(psi, f, base_mask=None):
    """Apply the spin lift of the right isometry U at every (masked) base sample.

    ``f`` is one factorization, or an array of them over the spacetime grid.
    The lift is computed at f.source; all fibers share it through the
    scaling isomorphism between gamma representations.
    """
    _require_on_grid(psi, _first(f).source, "factorization source")
    S = _lifts(f, lambda g: lift_isometry(g.U, g.source).matrix)
    return _apply_spin(psi, S, base_mask)


def step_left_isometry(psi, f, base_mask=None):
    """Apply exp(Sigma_{d'}(log V)) at every (masked) base sample; see lift_orthogonal."""
    _require_on_grid(psi, _first(f).target, "factorization target")
    S = _lifts(f, lambda g: lift_orthogonal(g.V, g.target).matrix)
    return _apply_spin(psi, S, base_mask)


def _spacetime_permutation(grid, motion):
    """Source->destination flat indices for a grid-permuting point map."""
    pts = grid.points().reshape(-1, 4)
    img = motion.apply(pts)
    steps = (img - np.array(grid.origin)) / np.array(grid.spacing)
    idx = np.rint(steps)
    if np.any(np.abs(steps - idx) > ALIGN_RTOL * np.maximum(1.0, np.abs(steps))):
        raise AlignmentError("spacetime map does not send grid points to grid points")
    idx = idx.astype(np.int64)
    inside = np.all((idx >= 0) & (idx < np.array(grid.shape)), axis=1)
    dst = np.full(len(pts), -1, dtype=np.int64)
    dst[inside] = np.ravel_multi_index(tuple(idx[inside].T), grid.shape)
    if len(np.unique(dst[inside])) != inside.sum():
        raise SupportError("spacetime map is not injective on the grid")
    return dst


def step_translate(psi, delta, motion=None, base_mask=None):
    """Relabel samples: psi'(m(x); d + delta) = psi(x; d).

    ``delta`` must be a whole number of base-lattice steps.  A translation
    motion moves the chart labels (the grid origin); a ``point_map`` motion
    permutes grid samples.  Nonzero samples may not leave either grid or
    land on samples outside the mask.
    """
    if not isinstance(delta, BaseShift):
        delta = BaseShift(tuple(delta))
    k = psi.base.lattice_offset(delta)
    sel = _base_mask(psi, base_mask)
    n_st = len(psi.spacetime.shape)
    vals = psi.values
    out = vals.copy()

    if any(k):
        src = np.argwhere(sel)
        dst = src + np.array(k)
        inside = np.all((dst >= 0) & (dst < np.array(psi.base.shape)), axis=1)
        moving = vals[(Ellipsis,) + tuple(src.T) + (slice(None),)]
        if np.any(moving[..., ~inside, :] != 0):
            raise SupportError("base translation pushes nonzero samples off the base grid")
        dst_in = dst[inside]
        landing = np.zeros(psi.base.shape, dtype=bool)
        landing[tuple(dst_in.T)] = True
        blocked = landing & ~sel
        if np.any(vals[..., blocked, :] != 0):
            raise SupportError("base translation collides with samples outside the mask")
        out[..., sel, :] = 0
        out[(Ellipsis,) + tuple(dst_in.T) + (slice(None),)] = moving[..., inside, :]
        # the shift may consume part of the zero layer; keep what is left
        w = psi.boundary_width
        while w > 0 and np.any(out[..., ~_inner_mask(psi.base.shape, w), :] != 0):
            w -= 1
        psi = dc_replace(psi, boundary_width=w)

    grid = psi.spacetime
    if motion is None:
        return psi.replace(out)
    if motion.point_map is None:
        return psi.replace(out, spacetime=grid.shifted(motion.shift))
    dst = _spacetime_permutation(grid, motion)
    flat = out.reshape((-1,) + out.shape[n_st:])
    if np.any(flat[dst < 0] != 0):
        raise SupportError("spacetime map pushes nonzero samples off the grid")
    moved = np.zeros_like(flat)
    moved[dst[dst >= 0]] = flat[dst >= 0]
    return psi.replace(moved.reshape(out.shape))


def factorize_motion(psi, motion, d0):
    """Factorizations for the right step (at x) and the left step (at m(x)).

    Returns ``(f_right, f_left, delta)``; for uniform motions both are a
    single factorization.
    """
    d0.require_lorentzian()
    if motion.uniform:
        f = decompose.factorize(motion.frame, d0)
        return f, f, f.baseShift
    pts = psi.spacetime.points()
    shape = pts.shape[:-1]
    flat = pts.reshape(-1, 4)
    metrics = [d0] * len(flat)
    f_right = decompose.factorize_batch(motion.frame_at(flat), metrics)
    if motion.point_map is None:
        f_left = decompose.factorize_batch(motion.frame_at(motion.apply(flat)), metrics)
    else:
        # a point map permutes the grid, so m(x) is itself a sample
        f_left = f_right
    shifts = np.array([f.baseShift.delta for f in f_right + f_left])
    if np.abs(shifts - shifts[0]).max() > SHIFT_UNIFORM_TOL:
        raise AlignmentError("the motion's base shift varies across spacetime; only uniform shifts are supported")
    as_grid = lambda fs: np.array(fs, dtype=object).reshape(shape)  # noqa: E731
    return as_grid(f_right), as_grid(f_left), f_right[0].baseShift


def transport(psi, motion, d0, base_mask=None):
    """Carry ``psi`` along a motion: right lift, base translation, left lift."""
    _require_on_grid(psi, d0, "reference metric")
    f_right, f_left, delta = factorize_motion(psi, motion, d0)
    out = step_right_isometry(psi, f_right, base_mask)
    out = step_translate(out, delta, motion, base_mask)
    if base_mask is not None:
        base_mask = _shifted_mask(np.asarray(base_mask, dtype=bool), psi.base.lattice_offset(delta))
    return step_left_isometry(out, f_left, base_mask)


def _shifted_mask(mask, k):
    out = np.zeros_like(mask)
    src = np.argwhere(mask)
    dst = src + np.array(k)
    inside = np.all((dst >= 0) & (dst < np.array(mask.shape)), axis=1)
    out[tuple(dst[inside].T)] = True
    return out


def density(psi):
    """Per-sample psi-bar psi with the gamma^0 of each base point."""
    g0 = DIRAC_GAMMAS[0].real.diagonal()
    v = psi.values
    std = np.einsum("...i,i,...i->...", v.conj(), g0, v).real
    scale0 = np.exp(0.5 * psi.base.axes[0])
    return std * scale0[(None,) * len(psi.spacetime.shape) + (slice(None), None, None, None)]


def total_norm(psi):
    """Sum of psi-bar psi times base and spacetime cell volumes (uniform log-chart measure).

    Uses a correctly rounded sum, so any permutation of samples gives the
    bit-identical result.
    """
    return math.fsum(density(psi).ravel()) * psi.base.cell_volume * psi.spacetime.cell_volume


def aggregate(psi):
    """Midpoint quadrature of psi(x; d) over the base, ``(*spacetime, 4)``."""
    n_st = len(psi.spacetime.shape)
    return psi.values.sum(axis=tuple(range(n_st, n_st + 4))) * psi.base.cell_volume
