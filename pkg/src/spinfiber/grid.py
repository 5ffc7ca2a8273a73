"""Uniform sample grids over a single chart and finite-difference helpers."""
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, PreconditionError, StencilError


@dataclass(frozen=True)
class ChartGrid:
    """Uniform grid over the (t, x1, x2, x3) chart.

    ``spacing`` is kept for singleton axes too; it sets the cell volume used
    by integrals and is ignored by derivatives (a singleton axis is treated
    as an axis along which the field does not vary).
    """

    origin: tuple
    spacing: tuple
    shape: tuple

    def __post_init__(self):
        origin = tuple(float(x) for x in self.origin)
        spacing = tuple(float(x) for x in self.spacing)
        shape = tuple(int(n) for n in self.shape)
        if not (len(origin) == len(spacing) == len(shape) == 4):
            raise PreconditionError("a chart grid has exactly 4 axes")
        if any(h <= 0 or not np.isfinite(h) for h in spacing):
            raise PreconditionError(f"grid spacing must be positive, got {spacing}")
        if any(n < 1 for n in shape):
            raise PreconditionError(f"grid shape must be positive, got {shape}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def from_axes(cls, axes, spacing=None, rtol=1e-9):
        """Build from explicit coordinate arrays, checking uniform increasing spacing."""
        if len(axes) != 4:
            raise PreconditionError("need 4 coordinate axes")
        origin, steps, shape = [], [], []
        for k, ax in enumerate(axes):
            ax = np.asarray(ax, dtype=float).ravel()
            if ax.size == 0:
                raise PreconditionError(f"axis {k} is empty")
            if ax.size == 1:
                h = 1.0 if spacing is None else float(spacing[k])
            else:
                diffs = np.diff(ax)
                h = float(diffs.mean())
                if h <= 0 or np.abs(diffs - h).max() > rtol * max(1.0, abs(h)):
                    raise PreconditionError(f"axis {k} is not uniformly increasing")
            origin.append(float(ax[0]))
            steps.append(h)
            shape.append(ax.size)
        return cls(tuple(origin), tuple(steps), tuple(shape))

    @property
    def axes(self):
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.shape)]

    def points(self):
        """Coordinates of every sample, shape ``(*shape, 4)``."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def shifted(self, offset):
        return ChartGrid(tuple(o + float(a) for o, a in zip(self.origin, offset)), self.spacing, self.shape)

    def refined(self, factor=2):
        """Same extent with spacing divided by ``factor`` on every sampled axis."""
        shape = tuple(n if n == 1 else (n - 1) * factor + 1 for n in self.shape)
        spacing = tuple(h / factor if n > 1 else h for h, n in zip(self.spacing, self.shape))
        return ChartGrid(self.origin, spacing, shape)

    def boundary_mask(self):
        """True at samples where a one-sided stencil is used on some axis."""
        mask = np.zeros(self.shape, dtype=bool)
        for k, n in enumerate(self.shape):
            if n > 1:
                idx = [slice(None)] * 4
                idx[k] = [0, n - 1]
                mask[tuple(idx)] = True
        return mask

    def interior(self):
        """Index tuple selecting samples where every sampled axis is interior."""
        return tuple(slice(None) if n == 1 else slice(1, n - 1) for n in self.shape)


def check_field(field, grid, tail, name="field"):
    field = np.asarray(field)
    want = tuple(grid.shape) + tuple(tail)
    if field.shape != want:
        raise GridMismatchError(f"{name} has shape {field.shape}, expected {want}")
    return field


def partial(field, grid, axis, offset=0):
    """Derivative along chart ``axis`` of an array whose axes start at ``offset``.

    Second-order central differences inside, second-order one-sided at the
    ends; zero along singleton axes.
    """
    n = grid.shape[axis]
    if n == 1:
        return np.zeros_like(field)
    if n < 3:
        raise StencilError(f"axis {axis} needs at least 3 samples for a second-order stencil")
    return np.gradient(field, grid.spacing[axis], axis=axis + offset, edge_order=2)


def gradient(field, grid):
    """Stack of the four chart derivatives, derivative index first."""
    return np.stack([partial(field, grid, ax) for ax in range(4)])
