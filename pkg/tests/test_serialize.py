import json

import numpy as np
import pytest

from spinfiber import serialize as ser
from spinfiber.base_metric import MINKOWSKI, DiagonalMetric
from spinfiber.decompose import factorize
from spinfiber.errors import PreconditionError
from spinfiber.fiber import BaseGrid, FiberSpinorField, MotionSpec
from spinfiber.grid import ChartGrid


def roundtrip(obj):
    return json.loads(ser.dump(obj))


def test_matrix_roundtrip(rng):
    A = rng.normal(size=(4, 4))
    np.testing.assert_array_equal(ser.matrix_from_json(roundtrip(ser.matrix_to_json(A))), A)
    C = A + 1j * rng.normal(size=(4, 4))
    obj = roundtrip(ser.matrix_to_json(C))
    assert len(obj["rows"][0][0]) == 2
    np.testing.assert_array_equal(ser.matrix_from_json(obj), C)


def test_matrix_validation():
    with pytest.raises(PreconditionError):
        ser.matrix_from_json({"rows": [[1, 2], [3, 4]]})


def test_metric_formats():
    d = DiagonalMetric((1, -1, -1, -1), (0.1, -0.2, 0.3, 0.0))
    assert ser.metric_from_json(roundtrip(ser.metric_to_json(d))) == d
    assert ser.metric_from_json({"entries": [1, -1, -1, -1]}) == MINKOWSKI


def test_factorization_fields():
    obj = roundtrip(ser.factorization_to_json(factorize(np.diag([2.0, 1, 1, 1]), MINKOWSKI)))
    assert set(obj) == {"V", "Delta", "U", "source", "target", "baseShift"}


def test_fiber_field_roundtrip(rng):
    st = ChartGrid.from_axes([np.linspace(0, 1, 3), [0.0], [0.5], [0.0]])
    base = BaseGrid.centered(MINKOWSKI, (0.1, 0.2, 0.2, 0.2), (0, 1, 1, 1))
    vals = rng.normal(size=st.shape + base.shape + (4,)) + 1j * rng.normal(size=st.shape + base.shape + (4,))
    psi = FiberSpinorField(st, base, vals)
    back = ser.fiber_field_from_json(roundtrip(ser.fiber_field_to_json(psi)))
    np.testing.assert_array_equal(back.values, psi.values)
    assert back.spacetime == st and back.base == base


def test_sampled_field_and_motion_roundtrip(rng):
    g = ChartGrid.from_axes([np.linspace(0, 1, 3), np.linspace(0, 2, 3), [0.0], [0.0]])
    e = rng.normal(size=g.shape + (4, 4))
    g2, e2 = ser.sampled_field_from_json(roundtrip(ser.sampled_field_to_json(g, e)), (4, 4))
    assert g2 == g
    np.testing.assert_array_equal(e2, e)
    m = MotionSpec(np.diag([1.0, 2, 2, 2]), shift=(0.5, 0, 0, 0))
    m2 = ser.motion_from_json(roundtrip(ser.motion_to_json(m)))
    np.testing.assert_array_equal(m2.frame, m.frame)
    assert tuple(m2.shift) == m.shift


def test_shortest_roundtrip_floats():
    x = 0.1 + 0.2
    assert json.loads(ser.dump({"x": x}))["x"] == x
    with pytest.raises(ValueError):
        ser.dump({"x": float("nan")})
