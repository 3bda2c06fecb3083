import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import crandn, random_unitary
from grothendieck.config import DimensionError, NotHermitianError, NotPSDError
from grothendieck.linalg import (
    diag_inv,
    gram_factor,
    hermitian_eig,
    is_psd,
    jacobi_eig,
    op_norm,
    phase,
    polar,
    psd_sqrt,
    svd,
)


def _eig_ok(A, w, V):
    assert np.linalg.norm(A @ V - V * w) <= 1e-10 * (1 + np.linalg.norm(A))
    assert np.linalg.norm(V.conj().T @ V - np.eye(len(w))) <= 1e-10
    assert np.all(np.diff(w) >= 0)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_identity_and_swap(method):
    w, V = hermitian_eig(np.eye(3), method)
    assert np.allclose(w, [1, 1, 1])
    w, V = hermitian_eig(np.array([[0, 1], [1, 0]]), method)
    assert np.allclose(w, [-1, 1], atol=1e-14)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eig_known_spectrum(rng, method):
    U = random_unitary(rng, 3)
    A = U @ np.diag([1.0, 2.0, 5.0]) @ U.conj().T
    w, V = hermitian_eig(A, method)
    assert np.allclose(w, [1, 2, 5], atol=1e-9)
    _eig_ok((A + A.conj().T) / 2, w, V)


def test_eig_phase_convention(rng):
    A = crandn(rng, 5, 5)
    A = A + A.conj().T
    _, V = hermitian_eig(A)
    for k in range(5):
        j = np.flatnonzero(np.abs(V[:, k]) > 1e-12)[0]
        assert V[j, k].imag == 0 and V[j, k].real >= 0


_herm = arrays(np.float64, (4, 4, 2), elements=st.floats(-10, 10, allow_nan=False, width=64))


@settings(max_examples=40, deadline=None)
@given(_herm)
def test_jacobi_matches_lapack(a):
    A = a[..., 0] + 1j * a[..., 1]
    A = A + A.conj().T
    wj, Vj = hermitian_eig(A, "jacobi")
    wl, _ = hermitian_eig(A, "lapack")
    assert np.allclose(wj, wl, atol=1e-9 * (1 + np.abs(A).max()))
    _eig_ok(A, wj, Vj)


def test_eig_errors():
    with pytest.raises(DimensionError):
        hermitian_eig(np.ones((2, 3)))
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eig(np.eye(2), method="qr")


def test_jacobi_diagonal_input():
    w, V = jacobi_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3])


def test_svd_examples(rng):
    _, s, _ = svd(np.diag([3.0, -4.0]))
    assert np.allclose(s, [4, 3])
    a, b = crandn(rng, 4), crandn(rng, 3)
    _, s, _ = svd(np.outer(a, b))
    assert np.isclose(s[0], np.linalg.norm(a) * np.linalg.norm(b))
    assert np.all(s[1:] < 1e-12)
    X = crandn(rng, 4, 3)
    U, s, V = svd(X)
    assert np.linalg.norm(X - (U * s) @ V.conj().T) <= 1e-10
    assert np.isclose(s[0], op_norm(X))


def test_max_abs_eig_is_op_norm(rng):
    for _ in range(10):
        A = crandn(rng, 5, 5)
        A = A + A.conj().T
        w, _ = hermitian_eig(A)
        assert abs(np.abs(w).max() - op_norm(A)) <= 1e-9


def test_polar_examples(rng):
    W, P = polar(np.eye(3))
    assert np.allclose(W, np.eye(3)) and np.allclose(P, np.eye(3))
    W, P = polar(np.array([[-2.0]]))
    assert np.allclose(W, [[-1]]) and np.allclose(P, [[2]])
    for _ in range(100):
        B = crandn(rng, 5, 5)
        W, P = polar(B)
        assert np.linalg.norm(B - W @ P) <= 1e-9
        assert np.min(np.linalg.eigvalsh(P)) >= -1e-12
    with pytest.raises(DimensionError):
        polar(np.ones((2, 3)))


def test_polar_rank_deficient(rng):
    a, b = crandn(rng, 4), crandn(rng, 4)
    B = np.outer(a, b) + np.outer(b, a)  # rank two
    W, P = polar(B)
    assert np.linalg.norm(B - W @ P) <= 1e-10
    proj = W.conj().T @ W
    # W*W is the orthogonal projection onto range(P)
    assert np.linalg.norm(proj @ proj - proj) <= 1e-10
    assert np.linalg.norm(proj @ P - P) <= 1e-10
    assert np.isclose(np.trace(proj).real, 2)


def test_psd_sqrt(rng):
    assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2, 3]))
    G = crandn(rng, 3, 5)
    P = G.conj().T @ G
    S = psd_sqrt(P)
    assert np.linalg.norm(S @ S - P) <= 1e-9
    with pytest.raises(NotPSDError):
        psd_sqrt(np.diag([1.0, -1e-3]))
    # tiny negative eigenvalues are clamped
    assert np.allclose(psd_sqrt(np.diag([1.0, -1e-12])), np.diag([1.0, 0.0]))


def test_psd_sqrt_monotone_on_diagonals(rng):
    d1 = rng.random(5)
    d2 = d1 + rng.random(5)
    assert np.all(np.diag(psd_sqrt(np.diag(d1))).real <= np.diag(psd_sqrt(np.diag(d2))).real)


def test_gram_factor(rng):
    G = crandn(rng, 2, 4)
    P = G.conj().T @ G
    F = gram_factor(P)
    assert F.shape[0] == 2
    assert np.linalg.norm(F.conj().T @ F - P) <= 1e-10
    assert is_psd(P) and not is_psd(-P)


def test_phase_and_diag_inv():
    assert np.allclose(phase([0, 2j, -3]), [1, 1j, -1])
    assert np.allclose(diag_inv(np.array([2.0, 0.0, 4.0])), [0.5, 0, 0.25])
