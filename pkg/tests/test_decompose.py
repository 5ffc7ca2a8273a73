import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spinfiber import mat4
from spinfiber.base_metric import MINKOWSKI, DiagonalMetric, congruence, shift
from spinfiber.decompose import exponential_parts, factorize, factorize_batch
from spinfiber.errors import SingularTransformError

from conftest import boost, rot

noise = arrays(float, (4, 4), elements=st.floats(-0.1, 0.1))
logs = st.lists(st.floats(-3, 3), min_size=4, max_size=4)


def check_valid(f, T, d, tol=1e-10):
    r = f.residuals(T)
    assert r["reconstruction"] <= tol * np.linalg.norm(T)
    assert r["right_isometry"] <= tol * np.abs(d.entries).max()
    assert abs(np.linalg.det(f.V) - 1) <= 1e-12
    np.testing.assert_allclose(f.target.log_abs, shift(f.source, f.baseShift).log_abs, atol=1e-15)


def test_identity():
    f = factorize(np.eye(4), MINKOWSKI)
    for M in (f.V, f.Delta, f.U):
        np.testing.assert_array_equal(M, np.eye(4))
    assert f.baseShift.delta == (0.0, 0.0, 0.0, 0.0)


def test_positive_diagonal():
    f = factorize(np.diag([2.0, 1, 1, 1]), MINKOWSKI)
    np.testing.assert_array_equal(f.V, np.eye(4))
    np.testing.assert_allclose(f.Delta, np.diag([2.0, 1, 1, 1]), rtol=1e-15)
    np.testing.assert_allclose(f.U, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(f.target.entries, [4, -1, -1, -1], rtol=1e-15)


def test_spatial_rotation_goes_into_U():
    Rz = rot(1, 2, 0.9)
    f = factorize(Rz, MINKOWSKI)
    np.testing.assert_allclose(f.V, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(f.Delta, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(f.U, Rz, atol=1e-14)
    assert f.target == MINKOWSKI or np.allclose(f.target.log_abs, 0, atol=1e-14)


def test_boost_goes_into_U():
    B = boost(1, 0.3)
    f = factorize(B, MINKOWSKI)
    np.testing.assert_allclose(f.V, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(f.U, B, atol=1e-14)
    v, dl, u = exponential_parts(f)
    np.testing.assert_allclose(v, 0, atol=1e-14)
    np.testing.assert_allclose(dl, 0, atol=1e-14)
    np.testing.assert_allclose(u, 0.3 * (np.eye(4)[[1, 0, 2, 3]] - np.diag([0, 0, 1, 1])), atol=1e-13)


def test_exponential_parts_examples():
    v, dl, u = exponential_parts(factorize(np.eye(4), MINKOWSKI))
    assert not np.any(v) and not np.any(dl) and not np.any(u)
    _, dl, _ = exponential_parts(factorize(np.diag([2.0, 1, 1, 1]), MINKOWSKI))
    np.testing.assert_allclose(dl, [np.log(2), 0, 0, 0], atol=1e-15)


def test_random_near_identity(rng):
    for _ in range(200):
        T = np.eye(4) + 0.05 * rng.normal(size=(4, 4))
        d = DiagonalMetric((1, -1, -1, -1), tuple(rng.uniform(-3, 3, 4)))
        check_valid(factorize(T, d), T, d)


@given(noise, logs)
def test_factorization_property(E, a):
    T = np.eye(4) + E
    d = DiagonalMetric((1, -1, -1, -1), tuple(a))
    f = factorize(T, d)
    check_valid(f, T, d)
    # target is the canonical diagonal form of the congruence
    w = mat4.eig_sym4(congruence(d, T)).eigenvalues
    np.testing.assert_allclose(f.target.entries, w, rtol=1e-10)


@given(st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4), st.floats(-1, 1), st.floats(-0.5, 0.5))
def test_idempotent_on_canonical_form(dl, th, phi):
    # canonical forms keep the spatial metric entries in ascending magnitude
    dl = [dl[0]] + sorted(dl[1:])
    U = rot(1, 3, th) @ boost(2, phi)
    Delta = np.diag(np.exp(dl))
    f = factorize(Delta @ U, MINKOWSKI)
    np.testing.assert_allclose(f.V, np.eye(4), atol=1e-9)
    np.testing.assert_allclose(f.Delta, Delta, atol=1e-9)
    np.testing.assert_allclose(f.U, U, atol=1e-9)


def test_deterministic(rng):
    T = np.eye(4) + 0.1 * rng.normal(size=(4, 4))
    d = DiagonalMetric((1, -1, -1, -1), (0.3, -1.0, 2.0, 0.1))
    a, b = factorize(T, d), factorize(T.copy(), d)
    for x, y in zip((a.V, a.Delta, a.U), (b.V, b.Delta, b.U)):
        np.testing.assert_array_equal(x, y)


def test_batch_matches_single(rng):
    T = np.eye(4) + 0.1 * rng.uniform(-1, 1, size=(20, 4, 4))
    ms = [DiagonalMetric((1, -1, -1, -1), tuple(x)) for x in rng.uniform(-3, 3, (20, 4))]
    for f, t, d in zip(factorize_batch(T, ms), T, ms):
        g = factorize(t, d)
        np.testing.assert_allclose(f.U, g.U, atol=1e-12)
        np.testing.assert_allclose(f.Delta, g.Delta, atol=1e-12)


def test_singular_rejected():
    T = np.eye(4)
    T[3, 3] = 0.0
    with pytest.raises(SingularTransformError):
        factorize(T, MINKOWSKI)
