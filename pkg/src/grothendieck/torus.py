"""Quadratic and bilinear maximization over unimodular vectors.

``max u* H u`` over ``|u_j| = 1`` (the B-norm of a PSD matrix, and the squared
F-norm of ``X`` when ``H = X* X``) and ``max |s^T X t|`` over unimodular
``s, t`` (the B-norm) are NP-hard. Both are reported as a :class:`NormBracket`:
the lower end is the best vector found by multi-start ascent, an exhaustive
phase grid for few variables and randomized rounding of the SDP optimum; the
upper end is the SDP relaxation value.
"""

from dataclasses import dataclass, field
import itertools
from typing import Any

import numpy as np

from .config import (
    DEFAULT_BUDGET,
    DEFAULT_TOL,
    KG_GENERAL_BOUND,
    KG_LITTLE,
    NotHermitianError,
)
from .linalg import as_matrix, as_square, gram_factor, min_eig, phase
from .sdp import solve_diag_dominance, solve_two_sided_scaling

__all__ = [
    "NormBracket",
    "TorusVector",
    "torus_vector",
    "quadratic_value",
    "bilinear_value",
    "max_quadratic_torus",
    "max_bilinear_torus",
    "quadratic_search",
    "bilinear_search",
]

RATIO_TOL = 1e-6
#: relative agreement with the SDP bound that certifies a torus maximum
SDP_TIGHT = 1e-7


@dataclass
class NormBracket:
    """Certified interval ``[lower, upper]`` with the witness attaining ``lower``.

    ``status`` is ``"ok"``, ``"budget_exhausted"`` or ``"ratio_violation"``
    (the bracket is wider than a proven constant allows, meaning the lower
    search missed the maximum).
    """

    lower: float
    upper: float
    witness: Any = field(default=None, repr=False)
    status: str = "ok"
    info: dict = field(default_factory=dict, repr=False)

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def ratio(self):
        return self.upper / self.lower if self.lower > 0 else np.inf

    def contains(self, value, tol=0.0):
        return self.lower - tol <= value <= self.upper + tol

    def scaled(self, c):
        return NormBracket(c * self.lower, c * self.upper, self.witness, self.status, dict(self.info))

    def sqrt(self):
        return NormBracket(
            float(np.sqrt(max(self.lower, 0.0))),
            float(np.sqrt(max(self.upper, 0.0))),
            self.witness,
            self.status,
            dict(self.info),
        )


@dataclass(frozen=True)
class TorusVector:
    """Unimodular vector stored by its phases in [0, 2 pi), first phase 0."""

    phases: tuple

    @property
    def u(self):
        return np.exp(1j * np.asarray(self.phases))


def torus_vector(u):
    """Normalize the global phase of a unimodular vector so ``u[0] = 1``."""
    u = phase(np.asarray(u, dtype=complex))
    ph = np.mod(np.angle(u * np.conj(u[0])), 2 * np.pi)
    ph[ph >= 2 * np.pi] = 0.0  # mod can round up to 2 pi
    ph[0] = 0.0
    return TorusVector(tuple(float(x) for x in ph))


def quadratic_value(H, u):
    return float(np.real(np.vdot(u, H @ u)))


def bilinear_value(X, s, t):
    return float(abs(s @ X @ t))


def _random_phases(rng, n, k):
    return np.exp(2j * np.pi * rng.random((n, k)))


def _rounding_starts(gram, rng, k):
    # gram: (r, n) with columns the Gram vectors; random complex hyperplanes
    g = rng.standard_normal((k, gram.shape[0])) + 1j * rng.standard_normal((k, gram.shape[0]))
    return phase(g.conj() @ gram).T


def _ascend_quadratic(Hs, U, tol):
    """Vectorized fixed-point ascent u <- phase(H u) for PSD ``Hs``."""
    scale = max(1.0, float(np.abs(Hs).sum()))
    obj = np.einsum("ik,ik->k", U.conj(), Hs @ U).real
    converged = False
    it = 0
    for it in range(tol.torus_max_iter):
        V = Hs @ U
        Un = phase(V)
        new = np.einsum("ik,ik->k", Un.conj(), Hs @ Un).real
        gain = new - obj
        U, obj = Un, new
        if np.all(gain < tol.torus_gain * scale):
            converged = True
            break
    return U, obj, converged, it + 1


def _quadratic_grid(Hs, budget):
    """Exhaustive grid: u_0 = 1, u_1..u_{n-2} on the grid, u_{n-1} optimal in closed form."""
    n = Hs.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex), float(Hs[0, 0].real)
    dims = n - 2
    grid = np.exp(2j * np.pi * np.arange(budget.grid_points) / budget.grid_points)
    Ha = Hs[: n - 1, : n - 1]
    h = Hs[n - 1, : n - 1]
    best_val, best_u = -np.inf, None
    chunk_dims = min(dims, max(0, int(np.log(4e5) / np.log(budget.grid_points) + 1e-9)))
    nf = 1 + dims - chunk_dims  # u_0 and the outer phases
    inner = (
        np.array(list(itertools.product(grid, repeat=chunk_dims))).T
        if chunk_dims
        else np.ones((0, 1), dtype=complex)
    )
    # the inner block's quadratic and linear parts do not depend on the outer phases
    quad_in = np.einsum("ik,ik->k", inner.conj(), Ha[nf:, nf:] @ inner).real
    h_in = h[nf:] @ inner
    for outer in itertools.product(grid, repeat=nf - 1):
        f = np.concatenate([[1.0], np.array(outer, dtype=complex)])
        const = float(np.real(f.conj() @ Ha[:nf, :nf] @ f))
        cross = 2 * np.real((f.conj() @ Ha[:nf, nf:]) @ inner)
        lin = h[:nf] @ f + h_in
        val = const + cross + quad_in + 2 * np.abs(lin) + Hs[n - 1, n - 1].real
        j = int(np.argmax(val))
        if val[j] > best_val:
            best_val = float(val[j])
            w = np.concatenate([f, inner[:, j]])
            best_u = np.concatenate([w, [phase(h @ w)]])
    return best_u[:, None], best_val


def quadratic_search(H, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL, extra_starts=None, grid=True):
    """Best ``u* H u`` found over the torus; returns ``(value, u, info)``.

    ``H`` is shifted to PSD internally so the ascent is monotone.
    """
    n = H.shape[0]
    shift = max(0.0, -min_eig(H))
    Hs = H + shift * np.eye(n)
    info = {"shift": shift, "grid": False, "converged": True}
    if np.all(np.abs(H.imag) <= 1e-14 * max(1.0, np.abs(H).max())) and np.all(H.real >= 0):
        u = np.ones(n, dtype=complex)
        info["nonnegative"] = True
        return float(H.real.sum()), u, info
    rng = np.random.default_rng(budget.seed)
    starts = [np.ones((n, 1), dtype=complex), _random_phases(rng, n, budget.n_starts)]
    w, v = np.linalg.eigh(Hs)
    starts.append(phase(v[:, -1:]))
    if extra_starts is not None:
        starts.append(np.asarray(extra_starts, dtype=complex).reshape(n, -1))
    if grid and n - 2 <= budget.grid_limit and budget.grid_points ** max(n - 2, 0) <= budget.max_grid_evals:
        gu, gval = _quadratic_grid(Hs, budget)
        starts.append(gu)
        info["grid"] = True
        info["grid_value"] = gval - shift * n
    U = np.hstack(starts)
    U, obj, conv, iters = _ascend_quadratic(Hs, U, tol)
    info["candidates"] = (U, obj - shift * n)
    k = int(np.argmax(obj))  # lowest index wins ties
    u = U[:, k] * np.conj(phase(U[0, k]))
    info["converged"] = conv
    info["iterations"] = iters
    return quadratic_value(H, u), u, info


def _check_hermitian(H, tol):
    H = as_square(H, "H")
    if np.linalg.norm(H - H.conj().T) > tol.hermitian_error * max(1.0, np.linalg.norm(H)):
        raise NotHermitianError("H must be Hermitian")
    return (H + H.conj().T) / 2


def max_quadratic_torus(H, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL):
    """Bracket ``max_{|u_j|=1} u* H u``.

    For PSD ``H`` this is ``|H|_B`` and the upper end is ``|H|_cbB`` from the
    diagonal-dominance SDP, so ``upper / lower <= 4/pi`` whenever the lower
    search found the true maximum; a wider bracket sets
    ``status = "ratio_violation"``. Indefinite ``H`` is shifted by ``c I``
    and the values corrected by ``c n``.
    """
    budget.validate()
    H = _check_hermitian(H, tol)
    n = H.shape[0]
    shift = max(0.0, -min_eig(H))
    Hs = H + shift * np.eye(n)
    sol = solve_diag_dominance(Hs, tol)
    upper = sol.primal_value - shift * n
    extra = None
    if budget.n_rounding > 0:
        rng = np.random.default_rng([budget.seed, 1])
        Q = (sol.dual_matrix + sol.dual_matrix.conj().T) / 2
        G = gram_factor(Q + 1e-12 * np.eye(n), rel_cut=1e-8)
        extra = _rounding_starts(G, rng, budget.n_rounding)
    # the grid is skipped when the ascent already meets the SDP bound
    value, u, info = quadratic_search(H, budget, tol, extra_starts=extra, grid=False)
    tight = value + shift * n >= sol.primal_value * (1 - SDP_TIGHT)
    if not tight:
        value, u, info = quadratic_search(H, budget, tol, extra_starts=extra)
    info["sdp_gap"] = sol.gap
    info["sdp_tight"] = bool(tight)
    info["certified"] = bool(info.get("nonnegative") or info.get("grid") or tight)
    info["real_phase"] = bool(np.all(np.abs(u.imag) < 1e-9))
    status = "ok" if info.get("converged", True) else "budget_exhausted"
    lower = value
    upper = max(upper, lower)
    if shift == 0.0 and lower > 0 and upper > KG_LITTLE * lower * (1 + RATIO_TOL):
        status = "ratio_violation"
    return NormBracket(lower, upper, witness=u, status=status, info=info)


def _ascend_bilinear(X, S, tol):
    scale = max(1.0, float(np.abs(X).sum()))
    prev = np.full(S.shape[1], -np.inf)
    monotone = True
    converged = False
    it = 0
    T = None
    for it in range(tol.torus_max_iter):
        v = X.T @ S  # (n, k): entries of s^T X
        T = np.conj(phase(v))
        half = np.abs(v).sum(axis=0)
        w = X @ T  # (m, k)
        S = np.conj(phase(w))
        obj = np.abs(w).sum(axis=0)
        if np.any(half < prev - 1e-12 * scale) or np.any(obj < half - 1e-12 * scale):
            monotone = False
        gain = obj - prev
        prev = obj
        if np.all(gain < tol.torus_gain * scale):
            converged = True
            break
    T = np.conj(phase(X.T @ S))
    obj = np.abs(np.einsum("ik,ij,jk->k", S, X, T))
    return S, T, obj, converged, monotone, it + 1


def _bilinear_grid(X, budget):
    """Grid over the phases of ``s`` (first fixed); ``t`` optimal in closed form."""
    m = X.shape[0]
    grid = np.exp(2j * np.pi * np.arange(budget.grid_points) / budget.grid_points)
    if m == 1:
        return np.ones((1, 1), dtype=complex), float(np.abs(X).sum())
    dims = m - 1
    chunk_dims = min(dims, max(1, int(np.log(2e5) / np.log(budget.grid_points))))
    outer_dims = dims - chunk_dims
    inner = np.array(list(itertools.product(grid, repeat=chunk_dims))).T
    best_val, best_s = -np.inf, None
    for outer in itertools.product(grid, repeat=outer_dims):
        k = inner.shape[1]
        S = np.vstack([np.ones((1, k)), np.tile(np.array(outer, dtype=complex)[:, None], (1, k)), inner])
        val = np.abs(X.T @ S).sum(axis=0)
        j = int(np.argmax(val))
        if val[j] > best_val:
            best_val, best_s = float(val[j]), S[:, j].copy()
    return best_s[:, None], best_val


def bilinear_search(X, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL, extra_starts=None, grid=True):
    """Best ``|s^T X t|`` found; returns ``(value, s, t, info)``."""
    m, n = X.shape
    info = {"grid": False}
    if np.all(np.abs(X.imag) <= 1e-14 * max(1.0, np.abs(X).max())) and np.all(X.real >= 0):
        s, t = np.ones(m, dtype=complex), np.ones(n, dtype=complex)
        info.update(nonnegative=True, converged=True, monotone=True)
        return float(X.real.sum()), s, t, info
    transpose = n < m
    Y = X.T if transpose else X
    k = Y.shape[0]
    rng = np.random.default_rng(budget.seed)
    starts = [np.ones((k, 1), dtype=complex), _random_phases(rng, k, budget.n_starts)]
    u, sv, vh = np.linalg.svd(Y)
    starts.append(np.conj(phase(u[:, :1])))
    if extra_starts is not None:
        ex = extra_starts[1] if transpose else extra_starts[0]
        starts.append(np.asarray(ex, dtype=complex).reshape(k, -1))
    if grid and k - 1 <= budget.grid_limit and budget.grid_points ** (k - 1) <= budget.max_grid_evals:
        gs, gval = _bilinear_grid(Y, budget)
        starts.append(gs)
        info["grid"] = True
        info["grid_value"] = gval
    S0 = np.hstack(starts)
    S, T, obj, conv, mono, iters = _ascend_bilinear(Y, S0, tol)
    if transpose:
        S, T = T, S
    # every local maximum, phases folded so that s^T X t > 0: used as a pool by callers
    z = np.einsum("ik,ij,jk->k", S, X, T)
    info["candidates"] = (S, T * np.conj(phase(z)), obj)
    j = int(np.argmax(obj))
    s, t = S[:, j], T[:, j]
    z = s @ X @ t
    # fold the global phase into t so that s^T X t is real nonnegative, and s[0] = 1
    t = t * np.conj(phase(z))
    s0 = phase(s[0])
    s, t = s * np.conj(s0), t * s0
    info.update(converged=conv, monotone=mono, iterations=iters)
    return bilinear_value(X, s, t), s, t, info


def max_bilinear_torus(X, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL):
    """Bracket ``|X|_B = max |s^T X t|`` over unimodular ``s, t``.

    The upper end is ``|X|_cbB``; ``upper / lower <= k/(2-k)`` is checked.
    """
    budget.validate()
    X = as_matrix(X, "X")
    m, n = X.shape
    if not np.any(X):
        return NormBracket(0.0, 0.0, witness=(np.ones(m, complex), np.ones(n, complex)))
    sol = solve_two_sided_scaling(X, "cbb", tol)
    extra = None
    if budget.n_rounding > 0:
        rng = np.random.default_rng([budget.seed, 2])
        Z = 2 * sol.dual_matrix
        G = gram_factor((Z + Z.conj().T) / 2 + 1e-12 * np.eye(m + n), rel_cut=1e-8)
        R = _rounding_starts(G, rng, budget.n_rounding)
        extra = (np.hstack([R[:m], np.conj(R[:m])]), np.hstack([R[m:], np.conj(R[m:])]))
    value, s, t, info = bilinear_search(X, budget, tol, extra_starts=extra, grid=False)
    tight = value >= sol.primal_value * (1 - SDP_TIGHT)
    if not tight:
        value, s, t, info = bilinear_search(X, budget, tol, extra_starts=extra)
    info["sdp_gap"] = sol.gap
    info["sdp_tight"] = bool(tight)
    info["certified"] = bool(info.get("nonnegative") or info.get("grid") or tight)
    info["real_phase"] = bool(np.all(np.abs(s.imag) < 1e-9) and np.all(np.abs(t.imag) < 1e-9))
    upper = max(sol.primal_value, value)
    status = "ok" if info.get("converged", True) else "budget_exhausted"
    if value > 0 and upper > KG_GENERAL_BOUND * value * (1 + RATIO_TOL):
        status = "ratio_violation"
    return NormBracket(value, upper, witness=(s, t), status=status, info=info)
