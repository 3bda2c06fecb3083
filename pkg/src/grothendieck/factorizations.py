"""Optimal factorizations read off the SDP solutions.

* :func:`cbb_factorization` -- ``X = diag(eta) B diag(xi)`` with ``|B| = |X|_cbB``.
* :func:`cbf_vector` -- the unit vector ``xi`` with ``|X diag(xi)^-1| = |X|_cbF``.
* :func:`schur_factorization` -- ``X = L* R`` with column norms realizing ``|X|_S``.
* :func:`fact_split` -- ``X = D C`` with both factors of cbF norm ``|X|_cbB^(1/2)``.
* :func:`duality_witness` -- a unit-ball element of the dual norm attaining the pairing.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, DomainError
from .linalg import as_matrix, diag_inv, gram_factor, polar, psd_sqrt
from .sdp import maximize_over_cbf_ball, solve_diag_dominance, solve_two_sided_scaling

__all__ = [
    "CbBFactorization",
    "SchurFactorization",
    "FactSplit",
    "cbb_factorization",
    "cbf_vector",
    "schur_factorization",
    "fact_split",
    "duality_witness",
]


def _nonzero(X):
    X = as_matrix(X, "X")
    if not np.any(X):
        raise DomainError("X must be nonzero")
    return X


@dataclass
class CbBFactorization:
    """``X = diag(eta) B diag(xi)`` with ``eta``, ``xi`` nonnegative l2-unit vectors."""

    eta: np.ndarray
    B: np.ndarray
    xi: np.ndarray
    value: float  # |X|_cbB from the SDP

    def matrix(self):
        return (self.eta[:, None] * self.B) * self.xi[None, :]


@dataclass
class SchurFactorization:
    """``X = L* R``; ``L`` is k x m and ``R`` is k x n."""

    L: np.ndarray
    R: np.ndarray
    value: float  # |X|_S from the SDP

    @staticmethod
    def col_norm(a):
        return float(np.linalg.norm(a, axis=0).max())

    def matrix(self):
        return self.L.conj().T @ self.R

    @property
    def bound(self):
        return self.col_norm(self.L) * self.col_norm(self.R)


@dataclass
class FactSplit:
    """``X = D C`` with ``C = P^(1/2) diag(xi)`` and ``D = diag(eta) W P^(1/2)``."""

    C: np.ndarray
    D: np.ndarray
    W: np.ndarray
    P: np.ndarray
    factorization: CbBFactorization

    def matrix(self):
        return self.D @ self.C


def cbb_factorization(X, tol=DEFAULT_TOL):
    """Factor ``X = diag(eta) B diag(xi)`` with ``|B|_inf = |X|_cbB``.

    ``eta = sqrt(a / sum a)`` and ``xi = sqrt(b / sum b)`` from the optimal
    diagonal scalings; inverses are taken on the support only.
    """
    X = _nonzero(X)
    sol = solve_two_sided_scaling(X, "cbb", tol)
    a = np.clip(sol.primal_vars["a"], 0.0, None)
    b = np.clip(sol.primal_vars["b"], 0.0, None)
    eta = np.sqrt(a / a.sum())
    xi = np.sqrt(b / b.sum())
    B = (diag_inv(eta)[:, None] * X) * diag_inv(xi)[None, :]
    return CbBFactorization(eta, B, xi, float(sol.primal_value))


def cbf_vector(X, tol=DEFAULT_TOL):
    """Optimal scaling vector for the cbF norm; returns ``(xi, Z)``.

    ``xi_j = sqrt(lam_j / sum lam)`` with ``lam`` the optimal diagonal
    dominating ``X* X``, and ``Z = X diag(xi)^-1`` has ``|Z|_inf = |X|_cbF``.
    """
    X = _nonzero(X)
    sol = solve_diag_dominance(X.conj().T @ X, tol)
    lam = np.clip(sol.primal_vars["lam"], 0.0, None)
    # columns of X that vanish carry no mass
    lam[np.linalg.norm(X, axis=0) <= tol.support * np.abs(X).max()] = 0.0
    xi = np.sqrt(lam / lam.sum())
    return xi, X * diag_inv(xi)[None, :]


def _canonical_rows(G):
    # unitary rotation to upper-triangular form with real nonnegative diagonal
    _, r = np.linalg.qr(G)
    d = np.diag(r)
    ph = np.where(np.abs(d) > 0, np.conj(d) / np.maximum(np.abs(d), 1e-300), 1.0)
    return ph[:, None] * r


def schur_factorization(X, tol=DEFAULT_TOL):
    """``X = L* R`` with every column of ``L`` and ``R`` of norm ``|X|_S^(1/2)``.

    The optimal PSD block ``[[W1, X], [X*, W2]]`` (constant diagonal ``t``)
    is Gram-factored; the factor is rotated to upper-triangular form so that
    the leading column of ``L`` is real nonnegative.
    """
    X = _nonzero(X)
    m, n = X.shape
    sol = solve_two_sided_scaling(X, "schur", tol)
    G = gram_factor(sol.primal_vars["block"], tol.gram_truncation, tol)
    G = _canonical_rows(G)
    return SchurFactorization(G[:, :m], G[:, m:], float(sol.primal_value))


def fact_split(X, tol=DEFAULT_TOL):
    """Split ``X = D C`` through the polar decomposition ``B = W P`` of the cbB factor."""
    X = _nonzero(X)
    m, n = X.shape
    f = cbb_factorization(X, tol)
    if m == n:
        W, P = polar(f.B, tol)
    else:
        # rectangular B: W is the m x n minimal partial isometry, P = (B* B)^(1/2)
        u, sv, vh = np.linalg.svd(f.B, full_matrices=False)
        keep = sv > tol.gram_truncation * max(sv[0], 1e-300)
        W = u[:, keep] @ vh[keep]
        P = (vh.conj().T * sv) @ vh
        P = (P + P.conj().T) / 2
    Ph = psd_sqrt(P, tol)
    C = Ph * f.xi[None, :]
    D = f.eta[:, None] * (W @ Ph)
    return FactSplit(C, D, W, P, f)


def duality_witness(X, pair="cbB-S", psd=False, tol=DEFAULT_TOL):
    """Dual unit-ball element ``Y`` attaining ``Re Tr(Y* X)``.

    ``pair="cbB-S"``: ``|Y|_S <= 1`` and ``Re Tr(Y* X) = |X|_cbB``. With
    ``psd=True`` and ``X`` positive semidefinite, ``Y`` is instead the unit
    diagonal PSD certificate ``Q`` of the diagonal-dominance program, which
    has ``|Q|_S = 1`` and ``Tr(Q X) = |X|_cbB``.

    ``pair="T-cbF"``: ``|Y|_cbF <= 1`` and ``Re Tr(Y* X) = |X|_T``.
    """
    X = _nonzero(X)
    if pair == "cbB-S":
        if psd:
            return solve_diag_dominance(X, tol).dual_matrix
        return solve_two_sided_scaling(X, "cbb", tol).extra["witness"]
    if pair == "T-cbF":
        return maximize_over_cbf_ball(X, tol).primal_vars["Y"]
    raise DomainError(f"unknown duality pair {pair!r}")
