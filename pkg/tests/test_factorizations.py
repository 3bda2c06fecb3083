import numpy as np
import pytest

from conftest import crandn
from grothendieck.config import DomainError
from grothendieck.factorizations import (
    cbb_factorization,
    cbf_vector,
    duality_witness,
    fact_split,
    schur_factorization,
)
from grothendieck.haagerup import haagerup_construction
from grothendieck.linalg import op_norm
from grothendieck.norms import norm


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def _cbf(Y):
    return norm(Y, "cbF").upper


def test_cbb_examples():
    f = cbb_factorization(np.ones((2, 2)))
    assert np.allclose(f.eta, [2**-0.5] * 2, atol=1e-7)
    assert np.allclose(f.xi, [2**-0.5] * 2, atol=1e-7)
    assert op_norm(f.B) == pytest.approx(4, rel=1e-7)
    f = cbb_factorization([[3.0]])
    assert f.eta == pytest.approx([1]) and f.xi == pytest.approx([1])
    assert np.allclose(f.B, [[3]])


def test_cbb_invariants(rng):
    for _ in range(100):
        m, n = rng.integers(1, 6, size=2)
        X = crandn(rng, m, n)
        f = cbb_factorization(X)
        assert _rel(f.matrix(), X) <= 1e-7
        assert op_norm(f.B) == pytest.approx(f.value, rel=1e-6)
        assert np.linalg.norm(f.eta) == pytest.approx(1, abs=1e-10)
        assert np.linalg.norm(f.xi) == pytest.approx(1, abs=1e-10)
        assert np.all(f.eta >= 0) and np.all(f.xi >= 0)


def test_cbf_vector_examples(rng):
    mu, nu = crandn(rng, 3), crandn(rng, 4)
    xi, Z = cbf_vector(np.outer(mu, nu))
    assert np.allclose(xi, np.sqrt(np.abs(nu) / np.abs(nu).sum()), atol=1e-6)
    xi, Z = cbf_vector(np.eye(4))
    assert np.allclose(xi, 0.5, atol=1e-7)
    assert op_norm(Z) == pytest.approx(2, rel=1e-7)


def test_cbf_vector_matches_haagerup_on_nonnegative(rng):
    for _ in range(5):
        X = rng.random((4, 3))
        xi, _ = cbf_vector(X)
        assert np.allclose(xi, haagerup_construction(X).xi, atol=1e-5)


def test_cbf_vector_is_optimal(rng):
    for _ in range(10):
        X = crandn(rng, 3, 4)
        xi, Z = cbf_vector(X)
        v = _cbf(X)
        assert op_norm(Z) == pytest.approx(v, rel=1e-6)
        for _ in range(20):
            p = np.abs(xi * np.exp(0.3 * rng.normal(size=4)))
            p /= np.linalg.norm(p)
            assert op_norm(X / p[None, :]) >= v - 1e-6


def test_schur_examples(rng):
    e11 = np.zeros((2, 3))
    e11[0, 0] = 1
    f = schur_factorization(e11)
    assert f.value == pytest.approx(1, rel=1e-7)
    assert np.linalg.norm(f.matrix() - e11) <= 1e-7
    assert f.bound == pytest.approx(1, rel=1e-6)
    mu, nu = crandn(rng, 3), crandn(rng, 2)
    f = schur_factorization(np.outer(mu, nu))
    assert f.bound == pytest.approx(np.abs(mu).max() * np.abs(nu).max(), rel=1e-6)


def test_schur_invariants(rng):
    for _ in range(100):
        m, n = rng.integers(1, 5, size=2)
        X = crandn(rng, m, n)
        f = schur_factorization(X)
        assert _rel(f.matrix(), X) <= 1e-7
        assert f.bound == pytest.approx(f.value, rel=1e-6)
        assert f.L.shape[0] <= m + n
        assert f.L[0, 0].imag == 0 and f.L[0, 0].real >= 0


def test_unit_columns_at_unit_norm(rng):
    X = crandn(rng, 3, 3)
    X /= norm(X, "S").upper
    f = schur_factorization(X)
    assert np.allclose(np.linalg.norm(f.L, axis=0), 1, atol=1e-6)
    assert np.allclose(np.linalg.norm(f.R, axis=0), 1, atol=1e-6)


def test_fact_split_examples(rng):
    mu, nu = crandn(rng, 3), crandn(rng, 3)
    s = fact_split(np.outer(mu, nu))
    assert _cbf(s.C) == pytest.approx(np.sqrt(np.abs(mu).sum() * np.abs(nu).sum()), rel=1e-5)
    s = fact_split(np.eye(2))
    assert np.linalg.norm(s.matrix() - np.eye(2)) <= 1e-8


def test_fact_split_identities(rng):
    for _ in range(20):
        m, n = rng.integers(1, 5, size=2)
        X = crandn(rng, m, n)
        s = fact_split(X)
        cbb = s.factorization.value
        assert _rel(s.matrix(), X) <= 1e-7
        assert _cbf(s.C) == pytest.approx(np.sqrt(cbb), rel=1e-5)
        assert _cbf(s.D.conj().T) == pytest.approx(np.sqrt(cbb), rel=1e-5)
        # the polar pieces: W a partial isometry and B = W P
        assert np.linalg.norm(s.W @ s.P - s.factorization.B) <= 1e-8 * max(1, op_norm(s.P))
        assert op_norm(s.W) <= 1 + 1e-9


def test_duality_witnesses(rng):
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1
    assert np.allclose(duality_witness(e11), e11, atol=1e-6)
    G = crandn(rng, 4, 4)
    P = G.conj().T @ G
    Q = duality_witness(P, psd=True)
    assert np.allclose(np.diag(Q), 1, atol=1e-9)
    assert np.trace(Q @ P).real == pytest.approx(norm(P, "cbB").upper, rel=1e-6)
    for _ in range(10):
        X = crandn(rng, 3, 3)
        Y = duality_witness(X, "cbB-S")
        assert norm(Y, "S").upper <= 1 + 1e-7
        assert np.trace(Y.conj().T @ X).real >= norm(X, "cbB").upper * (1 - 1e-6)
        Y = duality_witness(X, "T-cbF")
        assert _cbf(Y) <= 1 + 1e-7
        assert np.trace(Y.conj().T @ X).real >= norm(X, "T").upper * (1 - 1e-6)
    with pytest.raises(DomainError):
        duality_witness(X, "F-B")


def test_zero_matrix_rejected():
    for f in (cbb_factorization, schur_factorization, fact_split, lambda X: cbf_vector(X)):
        with pytest.raises(DomainError):
            f(np.zeros((2, 2)))
