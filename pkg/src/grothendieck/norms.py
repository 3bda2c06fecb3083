"""Norm calculators for complex m x n matrices.

Every calculator returns a :class:`~grothendieck.torus.NormBracket`. The
operator and Hilbert-Schmidt norms are exact; cbF, cbB, S and T come from an
SDP and their bracket is the primal/dual pair; F and B are NP-hard torus
maxima bracketed by heuristics and an SDP; the two projective norms are atomic
gauges computed by column generation.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from .config import DEFAULT_BUDGET, DEFAULT_TOL, KG_LITTLE, DomainError
from .linalg import as_matrix, op_norm, phase
from .sdp import maximize_over_cbf_ball, solve_diag_dominance, solve_two_sided_scaling
from .torus import (
    NormBracket,
    bilinear_search,
    max_bilinear_torus,
    max_quadratic_torus,
    quadratic_search,
)

__all__ = [
    "NormKind",
    "ALIASES",
    "AtomMixtureV",
    "norm",
    "rank_one_closed_forms",
    "hadamard",
    "torus_midpoints",
]


class NormKind(str, Enum):
    op = "op"
    hs = "hs"
    F = "F"
    cbF = "cbF"
    B = "B"
    cbB = "cbB"
    S = "S"
    T = "T"
    proj_inf_inf = "proj_inf_inf"
    proj_2_inf = "proj_2_inf"


#: names of the same norms elsewhere in the literature
ALIASES = {"H": "S", "h": "S", "gamma2": "cbB", "H'": "cbB", "Hprime": "cbB"}


def _kind(kind):
    if isinstance(kind, NormKind):
        return kind
    kind = ALIASES.get(kind, kind)
    try:
        return NormKind(kind)
    except ValueError:
        raise DomainError(f"unknown norm kind {kind!r}") from None


@dataclass
class AtomMixtureV:
    """Nonnegative combination ``sum_k c_k s_k t_k^T`` of rank-one atoms.

    For the (inf, inf) gauge ``s_k`` and ``t_k`` are unimodular; for the
    (2, inf) gauge ``s_k`` is an l2-unit vector.
    """

    left: np.ndarray  # (k, m)
    right: np.ndarray  # (k, n)
    coef: np.ndarray  # (k,)

    def matrix(self):
        return np.einsum("k,ki,kj->ij", self.coef, self.left, self.right)

    @property
    def gauge(self):
        return float(np.sum(np.abs(self.coef)))

    def __len__(self):
        return len(self.coef)


def _sdp_bracket(primal, dual, witness, gap, iterations):
    lo, hi = sorted((primal, dual))
    return NormBracket(lo, hi, witness=witness, info={"sdp_gap": gap, "iterations": iterations})


def hadamard(k):
    """Sylvester Hadamard matrix of order 2^ceil(log2 k)."""
    h = np.ones((1, 1))
    while h.shape[0] < k:
        h = np.block([[h, h], [h, -h]])
    return h


_UNITS = np.array([1, 1j, -1, -1j])


def _initial_pool_inf(m, n):
    hm, hn = hadamard(m)[:, :m], hadamard(n)[:, :n]
    left, right = [], []
    for w in _UNITS:
        for s in hm:
            for t in hn:
                left.append(w * s)
                right.append(t)
    return np.array(left, dtype=complex), np.array(right, dtype=complex)


def _initial_pool_2(m, n):
    hn = hadamard(n)[:, :n]
    eye = np.eye(m)
    left, right = [], []
    for w in _UNITS:
        for i in range(m):
            for t in hn:
                left.append(w * eye[i])
                right.append(t)
    return np.array(left, dtype=complex), np.array(right, dtype=complex)


def torus_midpoints(v):
    """Unimodular ``(a, b)`` with ``(a + b)/2 = v`` for ``v`` in the closed polydisc."""
    v = np.asarray(v, dtype=complex)
    r = np.clip(np.abs(v), 0.0, 1.0)
    p = phase(v)
    w = np.exp(1j * np.arccos(r))
    return p * w, p * np.conj(w)


def _svd_atoms(X, kind):
    # each singular term sigma u v^T split into unimodular atoms via midpoints
    u, sig, vh = np.linalg.svd(X, full_matrices=False)
    keep = sig > 1e-12 * sig[0]
    left, right = [], []
    for k in np.flatnonzero(keep):
        a, b = u[:, k], vh[k]
        tb = torus_midpoints(b / np.abs(b).max())
        if kind is NormKind.proj_inf_inf:
            ta = torus_midpoints(a / np.abs(a).max())
            for x in ta:
                for y in tb:
                    left.append(x)
                    right.append(y)
        else:
            for y in tb:
                left.append(a)
                right.append(y)
    return np.array(left, dtype=complex), np.array(right, dtype=complex)


def _lp(X, left, right):
    atoms = np.einsum("ki,kj->kij", left, right).reshape(len(left), -1)
    A = np.vstack([atoms.real.T, atoms.imag.T])
    b = np.concatenate([X.real.ravel(), X.imag.ravel()])
    res = linprog(np.ones(len(left)), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if res.status != 0:
        raise DomainError(f"gauge LP failed: {res.message}")
    y = res.eqlin.marginals
    mn = X.size
    G = (y[:mn] + 1j * y[mn:]).reshape(X.shape)
    return res.x, float(res.fun), G


def _gauge_cg(X, kind, budget, tol):
    """Column generation for the two projective gauges.

    The LP ``min sum c  s.t.  sum c_k a_k = X, c >= 0`` over the atom pool gives
    the upper end; its dual ``G`` prices new atoms (best ``Re<G, a>`` found by
    torus search) and yields the certified lower end
    ``Re<G, X> / (upper bound of the dual norm of G)``.
    """
    m, n = X.shape
    if kind is NormKind.proj_inf_inf:
        left, right = _initial_pool_inf(m, n)
        sol = solve_two_sided_scaling(X, "schur", tol)  # S <= gauge
    else:
        left, right = _initial_pool_2(m, n)
        sol = maximize_over_cbf_ball(X, tol)  # T <= gauge
    base = min(sol.primal_value, sol.dual_value)
    sl, sr = _svd_atoms(X, kind)
    left, right = np.vstack([sl, left]), np.vstack([sr, right])
    max_pool = len(left) + 64 * (m + n)
    pricing_budget = budget.with_(grid_limit=0, n_rounding=0, n_starts=min(budget.n_starts, 48))
    lower = base
    status = "budget_exhausted"
    rounds = 0
    for rounds in range(1, budget.cg_max_rounds + 1):
        coef, upper, G = _lp(X, left, right)
        used = len(left)
        if upper <= lower * (1 + budget.cg_rel_gap):
            status = "ok"
            break
        new_left, new_right, val = _price(np.conj(G), kind, pricing_budget.with_(seed=budget.seed + rounds), tol)
        converged = val <= 1 + 1e-9
        if converged or rounds % 10 == 0 or len(left) >= max_pool:
            lower = max(lower, _dual_lower(X, G, kind, tol))
            if upper <= lower * (1 + budget.cg_rel_gap):
                status = "ok"
                break
        if converged or len(left) >= max_pool:
            break
        left = np.vstack([left, new_left])
        right = np.vstack([right, new_right])
    left, right = left[:used], right[:used]
    keep = coef > 1e-12 * max(coef.max(), 1e-300)
    mix = AtomMixtureV(left[keep], right[keep], coef[keep])
    upper = mix.gauge
    info = {"rounds": rounds, "pool": used, "base": base}
    lower = min(lower, upper)
    return NormBracket(lower, upper, witness=mix, status=status, info=info)


def _price(Gc, kind, budget, tol, max_new=24):
    """Distinct atoms ``a`` with ``Re<G, a> > 1``, best first, and the best value.

    ``Gc`` is ``conj(G)``, so ``Re<G, s t^T> = Re s^T Gc t``.
    """
    if kind is NormKind.proj_inf_inf:
        _, _, _, info = bilinear_search(Gc, budget, tol, grid=False)
        S, T, obj = info["candidates"]
        L, R = S.T, T.T
    else:
        H = Gc.conj().T @ Gc
        _, _, info = quadratic_search(H, budget, tol, grid=False)
        U, obj = info["candidates"]
        obj = np.sqrt(np.maximum(obj, 0.0))
        V = Gc @ U  # Re mu^T (Gc nu) is maximized by mu = conj(Gc nu)/|Gc nu|
        L = (np.conj(V) / np.maximum(np.linalg.norm(V, axis=0), 1e-300)).T
        R = U.T
    order = np.argsort(-obj, kind="stable")
    best = float(obj[order[0]])
    picked = []
    for k in order:
        if obj[k] <= 1 + 1e-9 or len(picked) >= max_new:
            break
        a = np.outer(L[k], R[k])
        if all(np.abs(a - np.outer(L[j], R[j])).max() > 1e-6 for j in picked):
            picked.append(k)
    if not picked:
        picked = [order[0]]
    return L[picked], R[picked], best


def _dual_lower(X, G, kind, tol):
    pairing = float(np.real(np.vdot(G, X)))
    if pairing <= 0:
        return 0.0
    if kind is NormKind.proj_inf_inf:
        dual_upper = solve_two_sided_scaling(G, "cbb", tol).primal_value
    else:
        dual_upper = np.sqrt(solve_diag_dominance(G.conj().T @ G, tol).primal_value)
    return pairing / dual_upper


def norm(X, kind, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL):
    """Bracket the norm ``kind`` of ``X``.

    ``kind`` is a :class:`NormKind` or its string tag; the aliases in
    :data:`ALIASES` are accepted. See the module docstring for which kinds
    are exact, SDP-backed or heuristic.
    """
    kind = _kind(kind)
    budget.validate()
    X = as_matrix(X, "X")
    if not np.any(X):
        return NormBracket(0.0, 0.0)
    if kind is NormKind.op:
        v = op_norm(X)
        return NormBracket(v, v)
    if kind is NormKind.hs:
        v = float(np.linalg.norm(X))
        return NormBracket(v, v)
    if kind is NormKind.F:
        br = max_quadratic_torus(X.conj().T @ X, budget, tol).sqrt()
        if br.lower > 0 and br.upper > np.sqrt(KG_LITTLE) * br.lower * (1 + 1e-6):
            br.status = "ratio_violation"
        return br
    if kind is NormKind.cbF:
        sol = solve_diag_dominance(X.conj().T @ X, tol)
        lo, hi = sorted((max(sol.dual_value, 0.0), sol.primal_value))
        return NormBracket(
            float(np.sqrt(lo)),
            float(np.sqrt(hi)),
            witness=sol.primal_vars["lam"],
            info={"sdp_gap": sol.gap},
        )
    if kind is NormKind.B:
        return max_bilinear_torus(X, budget, tol)
    if kind is NormKind.cbB:
        sol = solve_two_sided_scaling(X, "cbb", tol)
        return _sdp_bracket(sol.primal_value, sol.dual_value, sol.extra["witness"], sol.gap, sol.iterations)
    if kind is NormKind.S:
        sol = solve_two_sided_scaling(X, "schur", tol)
        return _sdp_bracket(sol.primal_value, sol.dual_value, sol.primal_vars["block"], sol.gap, sol.iterations)
    if kind is NormKind.T:
        sol = maximize_over_cbf_ball(X, tol)
        return _sdp_bracket(sol.primal_value, sol.dual_value, sol.primal_vars["Y"], sol.gap, sol.iterations)
    return _gauge_cg(X, kind, budget, tol)


def rank_one_closed_forms(mu, nu):
    """All ten norms of the rank-one matrix ``mu nu^T`` in closed form."""
    mu = np.asarray(mu, dtype=complex).ravel()
    nu = np.asarray(nu, dtype=complex).ravel()
    if not np.any(mu) or not np.any(nu):
        raise DomainError("mu and nu must be nonzero")
    n1 = lambda v: float(np.abs(v).sum())  # noqa: E731
    n2 = lambda v: float(np.linalg.norm(v))  # noqa: E731
    ninf = lambda v: float(np.abs(v).max())  # noqa: E731
    return {
        "op": n2(mu) * n2(nu),
        "hs": n2(mu) * n2(nu),
        "F": n2(mu) * n1(nu),
        "cbF": n2(mu) * n1(nu),
        "B": n1(mu) * n1(nu),
        "cbB": n1(mu) * n1(nu),
        "S": ninf(mu) * ninf(nu),
        "T": n2(mu) * ninf(nu),
        "proj_inf_inf": ninf(mu) * ninf(nu),
        "proj_2_inf": n2(mu) * ninf(nu),
    }
