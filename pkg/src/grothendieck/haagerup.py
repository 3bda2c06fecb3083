"""Haagerup's explicit factorization through the optimal phase vector.

For ``X`` with F-norm ``f`` (the operator norm from the sup-norm to l2) pick
a unimodular ``u`` maximizing ``|X u|_2``. Then ``lam = conj(u) * (X* X u)``
is a nonnegative vector summing to ``f^2``, ``xi = sqrt(lam) / f`` is a unit
vector, and ``X diag(u) = f Z diag(xi)`` for a contraction-like ``Z`` with
``|Z| <= sqrt 2``. For entrywise nonnegative ``X`` the phase vector is all
ones and ``xi`` is the optimal cbF scaling vector.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_BUDGET, DEFAULT_TOL, DomainError
from .factorizations import cbb_factorization
from .linalg import as_matrix, diag_inv, op_norm
from .sdp import solve_diag_dominance
from .torus import NormBracket, max_quadratic_torus

__all__ = [
    "HaagerupData",
    "haagerup_construction",
    "verify_haagerup_inequalities",
    "nonneg_closed_forms",
    "cbb_bound_chain",
    "eigen_and_determinant_checks",
    "is_nonnegative",
]


def is_nonnegative(X, tol=0.0):
    X = np.asarray(X)
    return bool(np.all(np.abs(X.imag) <= tol) and np.all(X.real >= -tol))


@dataclass
class HaagerupData:
    """Output of :func:`haagerup_construction`.

    ``lam`` sums to ``f^2`` where ``f = f_norm_bracket.lower``; ``Z`` is the
    normalized factor with ``X diag(u) = f Z diag(xi)``.
    """

    u: np.ndarray
    lam: np.ndarray
    xi: np.ndarray
    Z: np.ndarray
    f_norm_bracket: NormBracket
    certified: bool
    info: dict = field(default_factory=dict)

    @property
    def f_norm(self):
        return self.f_norm_bracket.lower

    @property
    def scaled_norm(self):
        """``|X diag(xi)^-1|_inf``, an upper bound for ``|X|_cbF``."""
        return self.f_norm * op_norm(self.Z)


def haagerup_construction(X, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL):
    """Build ``u``, ``lam``, ``xi`` and ``Z`` for ``X``.

    ``certified`` is true when ``u`` is provably a maximizer: nonnegative
    input (then ``u`` is all ones), agreement with the SDP upper bound, or an
    exhaustive phase grid.
    """
    X = as_matrix(X, "X")
    if not np.any(X):
        raise DomainError("X must be nonzero")
    scale = float(np.linalg.norm(X))
    Xn = X / scale
    P = Xn.conj().T @ Xn
    br = max_quadratic_torus(P, budget, tol)
    u = br.witness
    lam_c = np.conj(u) * (P @ u)
    f2 = float(np.real(lam_c.sum()))
    lam = np.clip(lam_c.real, 0.0, None)
    lam[lam < 1e-12 * f2] = 0.0
    xi = np.sqrt(lam / f2)
    Z = (Xn * u[None, :]) * diag_inv(xi)[None, :] / np.sqrt(f2)
    f_bracket = br.sqrt().scaled(scale)
    info = {
        "stationarity": float(np.abs(lam_c.imag).max()),
        "negative_mass": float(np.clip(-lam_c.real, 0.0, None).max()),
        "torus_status": br.status,
    }
    return HaagerupData(
        u=u,
        lam=lam * scale**2,
        xi=xi,
        Z=Z,
        f_norm_bracket=f_bracket,
        certified=bool(br.info.get("certified")),
        info=info,
    )


def verify_haagerup_inequalities(X, data, sample_count=1000, seed=0, tol=1e-9):
    """Monte-Carlo check of the two quadratic inequalities behind ``|Z| <= sqrt 2``.

    For real ``a``: ``|X diag(u) a|^2 <= sum lam_j a_j^2``; for complex ``a``
    the right side doubles. Skipped unless ``data.certified``.
    """
    X = as_matrix(X, "X")
    if not data.certified:
        return {"status": "skipped", "reason": "phase vector not certified optimal"}
    n = X.shape[1]
    rng = np.random.default_rng(seed)
    Xu = X * data.u[None, :]
    out = {"status": "ok", "samples": sample_count}
    scale = float(np.sum(data.lam))
    for name, factor, cplx in (("real", 1.0, False), ("complex", 2.0, True)):
        a = rng.standard_normal((n, sample_count))
        if cplx:
            a = a + 1j * rng.standard_normal((n, sample_count))
        lhs = np.linalg.norm(Xu @ a, axis=0) ** 2
        rhs = factor * (data.lam @ np.abs(a) ** 2)
        slack = lhs - rhs
        bound = tol * scale * np.sum(np.abs(a) ** 2, axis=0)
        out[f"{name}_max_slack"] = float(np.max(slack / np.sum(np.abs(a) ** 2, axis=0)))
        out[f"{name}_violations"] = int(np.sum(slack > bound))
    if out["real_violations"] or out["complex_violations"]:
        out["status"] = "violated"
    return out


def nonneg_closed_forms(X):
    """Closed forms for entrywise nonnegative ``X``.

    Returns ``f_norm = cbf_norm = sqrt(sum_i |row_i|_1^2)`` and
    ``lam_j = sum_s sum_t x_sj x_st``.
    """
    X = as_matrix(X, "X")
    if not is_nonnegative(X):
        raise DomainError("X must be real with nonnegative entries")
    R = X.real
    rows = R.sum(axis=1)
    f = float(np.sqrt(np.sum(rows**2)))
    lam = R.T @ rows
    return {"f_norm": f, "cbf_norm": f, "lambda": lam}


def cbb_bound_chain(X, tol=DEFAULT_TOL):
    """``Tr P <= |P|_cbB <= sum_{s,j,t} |x_sj||x_st| <= (sum_j |col_j|_2)^2`` for ``P = X* X``."""
    X = as_matrix(X, "X")
    P = X.conj().T @ X
    A = np.abs(X)
    trace = float(np.trace(P).real)
    sol = solve_diag_dominance(P, tol)
    cbb = float(sol.primal_value)
    middle = float(np.sum(A.sum(axis=1) ** 2))
    upper = float(np.sum(np.linalg.norm(X, axis=0)) ** 2)
    slack = 1e-8 * max(1.0, upper)
    ordered = trace <= cbb + slack and cbb <= middle + slack and middle <= upper + slack
    equality = is_nonnegative(X) and abs(cbb - middle) <= 1e-6 * middle
    return {
        "trace": trace,
        "cbb": cbb,
        "middle_sum": middle,
        "upper": upper,
        "ordered": bool(ordered),
        "equality": bool(equality),
    }


def _det_eig(a):
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return float(np.prod(w)), w


def eigen_and_determinant_checks(X, data, tol=DEFAULT_TOL):
    """Eigenvector identity for ``gamma = u * xi`` and the two vanishing determinants.

    ``M = diag(xi)^-1 X* X diag(xi)^-1`` has ``M gamma = f^2 gamma``; both
    ``det(X* X - diag(lam))`` and ``det(X* X - |X* X|_cbB diag(eta^2))``
    vanish, ``eta`` from the cbB factorization of ``X* X``. Determinants are
    reported relative to the product of the diagonal magnitudes. Zero entries
    of ``xi`` restrict everything to the support.
    """
    X = as_matrix(X, "X")
    P = X.conj().T @ X
    f2 = float(np.sum(data.lam))
    supp = np.flatnonzero(data.xi > 1e-9)
    report = {"support": supp.size, "full_support": supp.size == X.shape[1]}
    xi = data.xi[supp]
    Ps = P[np.ix_(supp, supp)]
    M = Ps / np.outer(xi, xi)
    gamma = data.u[supp] * xi
    res = float(np.linalg.norm(M @ gamma - f2 * gamma))
    report["eigen_residual"] = res
    report["eigen_residual_rel"] = res / f2
    report["haagerup_norm_sq"] = float(np.linalg.eigvalsh(M)[-1])  # |diag(xi)^-1 X* X diag(xi)^-1|

    lam = data.lam[supp]
    d1, _ = _det_eig(Ps - np.diag(lam))
    scale1 = float(np.prod(np.maximum(np.abs(np.diag(Ps)), lam)))
    report["det_lambda"] = d1
    report["det_lambda_rel"] = abs(d1) / scale1

    fac = cbb_factorization(P, tol)
    mu = fac.eta**2
    if np.all(mu > 1e-12):
        D = fac.value * mu
        d2, _ = _det_eig(P - np.diag(D))
        scale2 = float(np.prod(np.maximum(np.abs(np.diag(P)), D)))
        report["det_cbb"] = d2
        report["det_cbb_rel"] = abs(d2) / scale2
    else:
        report["det_cbb"] = None
        report["det_cbb_rel"] = None
    report["cbb"] = fac.value
    return report
