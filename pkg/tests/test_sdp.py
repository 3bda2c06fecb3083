import cvxpy as cp
import numpy as np
import pytest
from scipy.optimize import minimize

from conftest import crandn
from grothendieck.config import DEFAULT_TOL, NonConvergenceError, NotPSDError
from grothendieck.linalg import op_norm
from grothendieck.sdp import (
    maximize_over_cbf_ball,
    solve_diag_dominance,
    solve_lmi,
    solve_two_sided_scaling,
)
from grothendieck.torus import max_bilinear_torus


def _psd(rng, n, k=None):
    G = crandn(rng, k or n, n)
    return G.conj().T @ G


# ---- independent oracles (cvxpy modelling + CLARABEL) ----


def cvx_diag_dominance(P):
    n = P.shape[0]
    lam = cp.Variable(n)
    cons = [cp.diag(lam) - P >> 0]
    prob = cp.Problem(cp.Minimize(cp.sum(lam)), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def _block(X, A, B):
    return cp.bmat([[A, X], [X.conj().T, B]])


def cvx_cbb(X):
    m, n = X.shape
    a, b = cp.Variable(m), cp.Variable(n)
    prob = cp.Problem(cp.Minimize((cp.sum(a) + cp.sum(b)) / 2), [_block(X, cp.diag(a), cp.diag(b)) >> 0])
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def cvx_schur(X):
    m, n = X.shape
    A = cp.Variable((m, m), hermitian=True)
    B = cp.Variable((n, n), hermitian=True)
    t = cp.Variable()
    cons = [_block(X, A, B) >> 0, cp.real(cp.diag(A)) <= t, cp.real(cp.diag(B)) <= t]
    prob = cp.Problem(cp.Minimize(t), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def cvx_T(X):
    m, n = X.shape
    Y = cp.Variable((m, n), complex=True)
    lam = cp.Variable(n)
    blk = cp.bmat([[np.eye(m), Y], [Y.conj().T, cp.diag(lam)]])
    cons = [blk >> 0, lam >= 0, cp.sum(lam) <= 1]
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(Y.conj().T @ X))), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def brute_cbb(X, rng, starts=6):
    """min over positive unit (eta, xi) of |diag(eta)^-1 X diag(xi)^-1|, by Nelder-Mead."""
    m, n = X.shape

    def f(p):
        eta = np.exp(p[:m])
        xi = np.exp(p[m:])
        eta /= np.linalg.norm(eta)
        xi /= np.linalg.norm(xi)
        return np.linalg.norm(X / np.outer(eta, xi), 2)

    best = np.inf
    for k in range(starts):
        p0 = np.zeros(m + n) if k == 0 else rng.normal(scale=0.5, size=m + n)
        r = minimize(f, p0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
        r = minimize(f, r.x, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
        best = min(best, r.fun)
    return best


# ---- diagonal dominance ----


def test_diag_dominance_identity():
    s = solve_diag_dominance(np.eye(3))
    assert s.primal_value == pytest.approx(3, rel=1e-8)
    assert np.allclose(s.primal_vars["lam"], 1, atol=1e-7)
    assert np.allclose(s.dual_matrix, np.eye(3), atol=1e-7)


def test_diag_dominance_all_ones():
    s = solve_diag_dominance(np.ones((2, 2)))
    assert s.primal_value == pytest.approx(4, rel=1e-8)
    assert np.allclose(s.primal_vars["lam"], [2, 2], atol=1e-6)


def test_diag_dominance_diagonal():
    d = np.array([0.5, 2.0, 3.0, 0.0])
    assert solve_diag_dominance(np.diag(d)).primal_value == pytest.approx(d.sum(), rel=1e-8)


def test_diag_dominance_matches_oracle(rng):
    for _ in range(8):
        n = int(rng.integers(2, 6))
        P = _psd(rng, n, k=int(rng.integers(1, n + 1)))
        s = solve_diag_dominance(P)
        assert s.primal_value == pytest.approx(cvx_diag_dominance(P), rel=1e-6)
        lam, Q = s.primal_vars["lam"], s.dual_matrix
        assert np.min(np.linalg.eigvalsh(np.diag(lam) - P)) >= -1e-9 * max(1, lam.max())
        assert np.allclose(np.diag(Q).real, 1, atol=1e-9)
        assert np.min(np.linalg.eigvalsh(Q)) >= -1e-9
        assert np.trace(P @ Q).real == pytest.approx(s.primal_value, rel=1e-8)
        assert s.gap <= 1e-8 * (1 + abs(s.primal_value))


def test_diag_dominance_rejects_non_psd():
    with pytest.raises(NotPSDError):
        solve_diag_dominance(np.diag([1.0, -1.0]))


# ---- two-sided scaling ----


def test_schur_examples(rng):
    e11 = np.zeros((3, 2))
    e11[0, 0] = 1
    assert solve_two_sided_scaling(e11, "schur").primal_value == pytest.approx(1, rel=1e-7)
    mu, nu = crandn(rng, 3), crandn(rng, 4)
    s = solve_two_sided_scaling(np.outer(mu, nu), "schur")
    assert s.primal_value == pytest.approx(np.abs(mu).max() * np.abs(nu).max(), rel=1e-7)


def test_cbb_rank_one(rng):
    for _ in range(5):
        mu, nu = crandn(rng, 3), crandn(rng, 2)
        s = solve_two_sided_scaling(np.outer(mu, nu), "cbb")
        assert s.primal_value == pytest.approx(np.abs(mu).sum() * np.abs(nu).sum(), rel=1e-7)


def test_cbb_and_schur_match_oracle(rng):
    for _ in range(8):
        m, n = rng.integers(1, 5, size=2)
        X = crandn(rng, m, n)
        c = solve_two_sided_scaling(X, "cbb")
        assert c.primal_value == pytest.approx(cvx_cbb(X), rel=1e-6)
        a, b = c.primal_vars["a"], c.primal_vars["b"]
        assert a.sum() == pytest.approx(b.sum(), rel=1e-6)
        blk = np.block([[np.diag(a), X], [X.conj().T, np.diag(b)]])
        assert np.min(np.linalg.eigvalsh(blk)) >= -1e-8 * c.primal_value
        W = c.extra["witness"]
        assert np.trace(W.conj().T @ X).real == pytest.approx(c.primal_value, rel=1e-7)
        s = solve_two_sided_scaling(X, "schur")
        assert s.primal_value == pytest.approx(cvx_schur(X), rel=1e-6)
        blk = s.primal_vars["block"]
        assert np.allclose(np.diag(blk).real, s.primal_value, rtol=1e-6)
        assert np.allclose(blk[:m, m:], X, atol=1e-8)
        # the witness lies in the unit Schur ball
        assert solve_two_sided_scaling(W, "schur").primal_value <= 1 + 1e-7


def test_cbb_equals_scaling_minimum(rng):
    # cbB as the best diagonal rescaling of X by positive unit vectors
    local = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        X = crandn(rng, 3, 3)
        sdp = solve_two_sided_scaling(X, "cbb").primal_value
        ref = brute_cbb(X, local)
        assert ref >= sdp * (1 - 1e-7)
        worst = max(worst, abs(ref - sdp))
    assert worst <= 1e-3


def test_cbb_dominates_torus_lower(rng):
    for _ in range(10):
        X = crandn(rng, 3, 4)
        assert solve_two_sided_scaling(X, "cbb").primal_value >= max_bilinear_torus(X).lower * (1 - 1e-9)


def test_zero_rows_are_pinned():
    X = np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 0.0], [3.0, -1.0, 0.0]])
    c = solve_two_sided_scaling(X, "cbb")
    assert c.primal_vars["a"][1] == 0 and c.primal_vars["b"][2] == 0
    assert c.primal_value == pytest.approx(cvx_cbb(X[np.ix_([0, 2], [0, 1])]), rel=1e-6)
    s = solve_two_sided_scaling(X, "schur")
    assert s.primal_vars["block"].shape == (6, 6)


def test_unknown_mode():
    with pytest.raises(ValueError):
        solve_two_sided_scaling(np.eye(2), "gamma")


# ---- T via the cbF ball ----


def test_T_examples(rng):
    e11 = np.zeros((2, 3))
    e11[0, 0] = 1
    assert maximize_over_cbf_ball(e11).primal_value == pytest.approx(1, rel=1e-7)
    mu, nu = crandn(rng, 4), crandn(rng, 3)
    s = maximize_over_cbf_ball(np.outer(mu, nu))
    assert s.primal_value == pytest.approx(np.linalg.norm(mu) * np.abs(nu).max(), rel=1e-7)
    col = crandn(rng, 4, 1)
    assert maximize_over_cbf_ball(col).primal_value == pytest.approx(np.linalg.norm(col), rel=1e-7)


def test_T_matches_oracle(rng):
    for _ in range(6):
        m, n = rng.integers(1, 5, size=2)
        X = crandn(rng, m, n)
        s = maximize_over_cbf_ball(X)
        assert s.primal_value == pytest.approx(cvx_T(X), rel=1e-6)
        Y, lam = s.primal_vars["Y"], s.primal_vars["lam"]
        assert np.trace(Y.conj().T @ X).real == pytest.approx(s.primal_value, rel=1e-7)
        # witness in the cbF ball: |Y diag(lam)^-1/2| <= 1 with sum(lam) <= 1
        assert lam.sum() <= 1 + 1e-8
        assert op_norm(Y / np.sqrt(np.maximum(lam, 1e-300))) <= 1 + 1e-6


# ---- common properties ----


@pytest.mark.parametrize("c", [0.25, 3.0, 40.0])
def test_homogeneity(rng, c):
    X = crandn(rng, 3, 3)
    P = X.conj().T @ X
    assert solve_diag_dominance(c * P).primal_value == pytest.approx(c * solve_diag_dominance(P).primal_value, rel=1e-8)
    for mode in ("cbb", "schur"):
        a = solve_two_sided_scaling(X, mode).primal_value
        assert solve_two_sided_scaling(c * X, mode).primal_value == pytest.approx(c * a, rel=1e-8)
    a = maximize_over_cbf_ball(X).primal_value
    assert maximize_over_cbf_ball(-c * X).primal_value == pytest.approx(c * a, rel=1e-8)


def test_gap_small(rng):
    for _ in range(5):
        X = crandn(rng, 3, 2)
        for s in (
            solve_two_sided_scaling(X, "cbb"),
            solve_two_sided_scaling(X, "schur"),
            maximize_over_cbf_ball(X),
            solve_diag_dominance(X @ X.conj().T),
        ):
            assert s.gap <= 1e-8 * (1 + abs(s.primal_value))


def test_non_convergence_attaches_iterate():
    F0 = -np.ones((2, 2))
    Fs = np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    with pytest.raises(NonConvergenceError) as info:
        solve_lmi(np.ones(2), F0, Fs, max_iter=2)
    assert info.value.last is not None
    assert info.value.last.iterations == 2
    assert solve_lmi(np.ones(2), F0, Fs, tol=DEFAULT_TOL).converged
