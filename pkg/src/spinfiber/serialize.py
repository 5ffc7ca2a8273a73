"""JSON encodings for matrices, metrics, grids and fields.

Complex numbers are written as ``[re, im]``; floats use Python's shortest
round-trip repr, so every file is diffable and reloads bit-exactly.
"""
import hashlib
import json

import numpy as np

from .base_metric import DiagonalMetric, metric_from_entries
from .errors import PreconditionError
from .fiber import BaseGrid, FiberSpinorField, MotionSpec
from .grid import ChartGrid


def encode_array(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return np.stack([a.real, a.imag], axis=-1).tolist()
    return a.tolist()


def decode_array(obj, complex_tail=False):
    """Nested lists to ndarray; with ``complex_tail`` a trailing ``[re, im]`` axis becomes complex."""
    a = np.asarray(obj, dtype=float)
    if complex_tail:
        if a.shape[-1:] != (2,):
            raise PreconditionError("complex values must be [re, im] pairs")
        return a[..., 0] + 1j * a[..., 1]
    return a


def matrix_to_json(A):
    return {"rows": encode_array(A)}


def matrix_from_json(obj):
    rows = obj["rows"] if isinstance(obj, dict) else obj
    a = np.asarray(rows, dtype=object)
    if a.ndim == 3:
        A = decode_array(rows, complex_tail=True)
    else:
        A = np.asarray(rows, dtype=float)
    if A.shape != (4, 4):
        raise PreconditionError(f"matrix must be 4x4, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise PreconditionError("matrix entries must be finite")
    return A


def metric_to_json(d):
    return {"signs": list(d.signs), "log_abs": list(d.log_abs)}


def metric_from_json(obj):
    """Accepts ``{"signs", "log_abs"}`` or the convenience form ``{"entries": [...]}``."""
    if "entries" in obj:
        return metric_from_entries(*obj["entries"])
    return DiagonalMetric(tuple(obj["signs"]), tuple(obj["log_abs"]))


def factorization_to_json(f):
    return {
        "V": matrix_to_json(f.V),
        "Delta": matrix_to_json(f.Delta),
        "U": matrix_to_json(f.U),
        "source": metric_to_json(f.source),
        "target": metric_to_json(f.target),
        "baseShift": list(f.baseShift.delta),
    }


def grid_to_json(g):
    return {"axes": [ax.tolist() for ax in g.axes], "spacing": list(g.spacing)}


def grid_from_json(obj):
    return ChartGrid.from_axes(obj["axes"], obj.get("spacing"))


def base_grid_to_json(b):
    return {"log_abs_axes": [ax.tolist() for ax in b.axes], "signs": list(b.signs), "spacing": list(b.spacing)}


def base_grid_from_json(obj):
    return BaseGrid.from_axes(obj["log_abs_axes"], tuple(obj.get("signs", (1, -1, -1, -1))), obj.get("spacing"))


def sampled_field_from_json(obj, tail):
    """``{"grid": {...}, "values": [...]}`` to (ChartGrid, ndarray with trailing ``tail`` shape)."""
    grid = grid_from_json(obj["grid"])
    values = np.asarray(obj["values"], dtype=float)
    want = tuple(grid.shape) + tuple(tail)
    if values.shape != want:
        raise PreconditionError(f"field values have shape {values.shape}, expected {want}")
    return grid, values


def sampled_field_to_json(grid, values):
    return {"grid": grid_to_json(grid), "values": encode_array(values)}


def fiber_field_to_json(psi):
    return {
        "spacetime_grid": grid_to_json(psi.spacetime),
        "base_grid": base_grid_to_json(psi.base),
        "values": encode_array(psi.values),
        "boundary_width": psi.boundary_width,
    }


def fiber_field_from_json(obj):
    st = grid_from_json(obj["spacetime_grid"])
    base = base_grid_from_json(obj["base_grid"])
    values = decode_array(obj["values"], complex_tail=True)
    return FiberSpinorField(st, base, values, int(obj.get("boundary_width", 0)))


def motion_from_json(obj):
    """``{"transform": {"rows": ...}, "spacetime_shift": [..4..]}`` (uniform motions only)."""
    T = matrix_from_json(obj["transform"])
    return MotionSpec(T, shift=tuple(obj.get("spacetime_shift", (0.0, 0.0, 0.0, 0.0))))


def motion_to_json(m):
    if not m.uniform or m.point_map is not None:
        raise PreconditionError("only uniform translation motions have a JSON form")
    return {"transform": matrix_to_json(m.frame), "spacetime_shift": list(m.shift)}


def load(path):
    with open(path) as fh:
        return json.load(fh)


def dump(obj, path=None):
    text = json.dumps(obj, allow_nan=False, sort_keys=False)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def digest(path):
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()
