import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spinfiber import mat4
from spinfiber.base_metric import MINKOWSKI, DiagonalMetric
from spinfiber.clifford import DIRAC_GAMMAS, deformed_gammas, norm_density, sigma, standard_gammas
from spinfiber.errors import NotAnIsometryError, NotAnIsometryGeneratorError
from spinfiber.spinlift import (IsometryGenerator, boost_generator, intertwining_residual, lift_generator,
                                lift_isometry, rotation_generator, spin_exp)

from conftest import boost, rot

logs = st.lists(st.floats(-2, 2), min_size=4, max_size=4)
antisym = arrays(float, (6,), elements=st.floats(-1, 1))


def random_generator(c, d):
    A = np.zeros((4, 4))
    A[np.triu_indices(4, 1)] = c
    A = A - A.T
    lam = IsometryGenerator.from_antisymmetric(A, d)
    return IsometryGenerator(lam.matrix / max(1.0, np.linalg.norm(lam.matrix, 2)), d)


def test_zero_generator():
    np.testing.assert_array_equal(lift_generator(np.zeros((4, 4))), 0)
    np.testing.assert_array_equal(spin_exp(np.zeros((4, 4))), np.eye(4))


def test_generator_check():
    with pytest.raises(NotAnIsometryGeneratorError):
        IsometryGenerator(np.eye(4), MINKOWSKI)
    with pytest.raises(NotAnIsometryError):
        lift_isometry(np.diag([2.0, 1, 1, 1]), MINKOWSKI)


def test_rotation_and_boost_generators():
    rep = standard_gammas()
    G = lift_generator(rotation_generator(1, 2))
    s12 = sigma(rep, 1, 2)
    c = np.vdot(s12, G) / np.vdot(s12, s12)
    np.testing.assert_allclose(G, c * s12, atol=1e-15)
    assert abs(c) == pytest.approx(0.5)
    G = lift_generator(boost_generator(1))
    g01 = DIRAC_GAMMAS[0] @ DIRAC_GAMMAS[1]
    c = np.vdot(g01, G) / np.vdot(g01, g01)
    np.testing.assert_allclose(G, c * g01, atol=1e-15)


def test_convention_pin():
    # [Sigma(lam), gamma^m] = -lam^m_n gamma^n pins S gamma S^-1 = L^-1 gamma
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = DiagonalMetric((1, -1, -1, -1), tuple(rng.uniform(-2, 2, 4)))
        lam = random_generator(rng.uniform(-1, 1, 6), d)
        Sig = lift_generator(lam)
        g = deformed_gammas(d).gammas
        comm = np.einsum("ij,mjk->mik", Sig, g) - np.einsum("mij,jk->mik", g, Sig)
        want = -np.einsum("mn,nik->mik", lam.matrix, g)
        assert np.abs(comm - want).max() <= 1e-12 * max(1.0, np.abs(d.entries).max())


def test_identity_and_double_cover():
    np.testing.assert_allclose(lift_isometry(np.eye(4), MINKOWSKI).matrix, np.eye(4), atol=1e-15)
    S = spin_exp(2 * np.pi * rotation_generator(1, 2))
    np.testing.assert_allclose(S, -np.eye(4), atol=1e-10)


def test_boost_preserves_density(rng):
    S = lift_isometry(boost(3, 0.5), MINKOWSKI).matrix
    rep = standard_gammas()
    for _ in range(50):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        assert norm_density(rep, S @ psi) == pytest.approx(norm_density(rep, psi), rel=1e-10, abs=1e-12)


@given(antisym, logs)
def test_intertwining(c, a):
    d = DiagonalMetric((1, -1, -1, -1), tuple(a))
    lam = random_generator(c, d)
    L = mat4.mat_exp(lam.matrix)
    S = spin_exp(lam)
    assert intertwining_residual(S, L, d) <= 1e-9 * max(1.0, np.exp(max(a)))
    assert intertwining_residual(lift_isometry(L, d).matrix, L, d) <= 1e-9 * max(1.0, np.exp(max(a)))


@given(antisym, antisym, logs)
def test_projective_homomorphism(c1, c2, a):
    d = DiagonalMetric((1, -1, -1, -1), tuple(a))
    L1 = mat4.mat_exp(0.3 * random_generator(c1, d).matrix)
    L2 = mat4.mat_exp(0.3 * random_generator(c2, d).matrix)
    lhs = lift_isometry(L1 @ L2, d).matrix
    rhs = lift_isometry(L1, d).matrix @ lift_isometry(L2, d).matrix
    np.testing.assert_allclose(lhs, rhs, atol=1e-8)


@given(antisym, logs)
def test_norm_preserved(c, a):
    d = DiagonalMetric((1, -1, -1, -1), tuple(a))
    S = spin_exp(random_generator(c, d))
    rep = deformed_gammas(d)
    psi = np.array([1.0, 0.3j, -0.2, 0.5 + 0.1j])
    n0, n1 = norm_density(rep, psi), norm_density(rep, S @ psi)
    assert abs(n1 - n0) <= 1e-10 * max(abs(n0), np.abs(psi).sum() ** 2)


@given(antisym, logs)
def test_base_point_equivariance(c, a):
    d = DiagonalMetric((1, -1, -1, -1), tuple(a))
    lam = random_generator(c, d).matrix
    s = np.exp(0.5 * np.array(a))
    lam_eta = lam * s[None, :] / s[:, None]  # s^-1 lam s
    np.testing.assert_allclose(spin_exp(lam, d), spin_exp(lam_eta, MINKOWSKI), atol=1e-9)


def test_rotation_lift_is_unitary_boost_is_not():
    R = lift_isometry(rot(1, 3, 0.7), MINKOWSKI).matrix
    np.testing.assert_allclose(R @ R.conj().T, np.eye(4), atol=1e-14)
    B = lift_isometry(boost(1, 0.7), MINKOWSKI).matrix
    np.testing.assert_allclose(B, B.conj().T, atol=1e-14)
