"""Points of the base space of nondegenerate diagonal metrics.

A metric is stored as per-entry signs plus ``log|d_k|``.  In that chart the
dilatation subgroup acts by plain addition, so a base shift is a translation
in R^4 and the uniform measure is translation invariant.
"""
from dataclasses import dataclass

import numpy as np

from . import mat4
from .errors import DegenerateMetricError, PreconditionError, SignatureError, SingularTransformError

LORENTZ_SIGNS = (1, -1, -1, -1)


@dataclass(frozen=True)
class BaseShift:
    delta: tuple

    def __post_init__(self):
        delta = tuple(float(x) for x in self.delta)
        if len(delta) != 4 or not all(np.isfinite(delta)):
            raise PreconditionError("a base shift needs 4 finite components")
        object.__setattr__(self, "delta", delta)

    @classmethod
    def zero(cls):
        return cls((0.0, 0.0, 0.0, 0.0))

    def __add__(self, other):
        return BaseShift(tuple(a + b for a, b in zip(self.delta, other.delta)))

    def __neg__(self):
        return BaseShift(tuple(-a for a in self.delta))

    def as_array(self):
        return np.array(self.delta)


@dataclass(frozen=True)
class DiagonalMetric:
    signs: tuple
    log_abs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        log_abs = tuple(float(x) for x in self.log_abs)
        if len(signs) != 4 or len(log_abs) != 4:
            raise PreconditionError("a diagonal metric has exactly 4 entries")
        if any(s not in (1, -1) for s in signs):
            raise PreconditionError(f"signs must be +1/-1, got {signs}")
        if not all(np.isfinite(log_abs)):
            raise DegenerateMetricError("log|d_k| must be finite")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "log_abs", log_abs)

    @property
    def entries(self):
        return np.array(self.signs, dtype=float) * np.exp(np.array(self.log_abs))

    @property
    def scales(self):
        """sqrt|d_k|, the factor that takes the unit-metric gammas to this point."""
        return np.exp(0.5 * np.array(self.log_abs))

    def matrix(self):
        return np.diag(self.entries)

    def inverse_entries(self):
        return np.array(self.signs, dtype=float) * np.exp(-np.array(self.log_abs))

    @property
    def is_lorentzian(self):
        return self.signs == LORENTZ_SIGNS

    def require_lorentzian(self):
        if not self.is_lorentzian:
            raise SignatureError(f"signature {self.signs} is not (+,-,-,-)")


MINKOWSKI = DiagonalMetric(LORENTZ_SIGNS, (0.0, 0.0, 0.0, 0.0))


def metric_from_entries(d0, d1, d2, d3):
    d = np.array([d0, d1, d2, d3], dtype=float)
    if np.any(d == 0.0) or not np.all(np.isfinite(d)):
        raise DegenerateMetricError(f"diagonal metric entries must be finite and nonzero: {d}")
    return DiagonalMetric(tuple(np.sign(d).astype(int)), tuple(np.log(np.abs(d))))


def shift(d, delta):
    """Translate ``d`` by ``delta`` in the log chart; signs never change."""
    if not isinstance(delta, BaseShift):
        delta = BaseShift(tuple(delta))
    return DiagonalMetric(d.signs, tuple(a + b for a, b in zip(d.log_abs, delta.delta)))


def congruence(d, T):
    """Return ``T diag(d) T^T`` (same signature as d by Sylvester's law)."""
    T = mat4.as_real4(T, "T")
    if np.linalg.cond(T) > mat4.SINGULAR_COND:
        raise SingularTransformError("transformation is singular")
    out = (T * d.entries) @ T.T
    return 0.5 * (out + out.T)


def signature(S, rtol=1e-12):
    """Sorted sign pattern of a symmetric matrix's eigenvalues, positives first."""
    w = np.linalg.eigvalsh(np.asarray(S, dtype=float))
    cut = rtol * np.abs(w).max()
    if np.any(np.abs(w) <= cut):
        raise DegenerateMetricError("matrix is degenerate")
    return tuple(sorted((1 if x > 0 else -1 for x in w), reverse=True))
