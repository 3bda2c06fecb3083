"""Small dense semidefinite programs behind the completely bounded norms.

Everything is solved by one primal-dual path-following method (HKM search
direction, Mehrotra predictor-corrector) for the linear matrix inequality

    minimize  c @ y   subject to   F(y) = F0 + sum_i y_i F_i  >= 0,

with Hermitian ``F_i`` and real ``y``. Its dual is

    maximize  -Tr(F0 Z)   subject to   Tr(F_i Z) = c_i,  Z >= 0,

and ``Z`` is the certificate returned to callers. Linear inequalities are
encoded as 1 x 1 diagonal blocks of the same matrix, so a single dense
Hermitian block is all the solver handles. Sizes are desk scale (a few dozen
variables, matrices up to ~30 x 30).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr, solve_triangular

from .config import DEFAULT_TOL, DomainError, NonConvergenceError, NotHermitianError, NotPSDError
from .linalg import as_matrix, as_square, min_eig, op_norm

__all__ = [
    "LmiResult",
    "SdpSolution",
    "solve_lmi",
    "solve_diag_dominance",
    "solve_two_sided_scaling",
    "maximize_over_cbf_ball",
]


@dataclass
class LmiResult:
    y: np.ndarray
    S: np.ndarray  # F(y)
    Z: np.ndarray
    primal: float  # c @ y
    dual: float  # -Tr(F0 Z)
    iterations: int
    converged: bool


@dataclass
class SdpSolution:
    """Solution of one of the norm programs.

    ``primal_value`` is the minimization side (diagonal dominance, scaling)
    or the maximization side (cbF ball); ``dual_value`` is its partner, and
    ``gap`` their distance. ``primal_vars`` holds the named problem variables
    and ``dual_matrix`` the PSD certificate.
    """

    primal_value: float
    dual_value: float
    primal_vars: dict
    dual_matrix: np.ndarray
    gap: float
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def value(self):
        return self.primal_value


def _sym(a):
    return (a + a.conj().T) / 2


def _max_step(x, dx):
    """Largest t <= 1/0.98 style step with x + t dx PSD (x PD)."""
    try:
        l = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    li = np.linalg.inv(l)
    m = _sym(li @ dx @ li.conj().T)
    lo = np.linalg.eigvalsh(m)[0]
    return np.inf if lo >= 0 else -1.0 / lo


def solve_lmi(c, F0, Fs, tol=DEFAULT_TOL, max_iter=None, y0=None):
    """Solve ``min c@y  s.t.  F0 + sum y_i Fs[i] >= 0``.

    ``Fs`` is an array of shape ``(p, N, N)``. Raises
    :class:`NonConvergenceError` (with the last iterate attached) when the
    relative gap and residuals have not reached ``tol.sdp_rel_gap`` after
    ``max_iter`` Newton steps.
    """
    c = np.asarray(c, dtype=float)
    # solve the problem with unit c and unit F0 and undo both scalings at the
    # end (y scales with F0, the dual matrix with c); keeps the start centred
    cscale = float(np.linalg.norm(c)) or 1.0
    c = c / cscale
    C = _sym(np.asarray(F0, dtype=complex))
    fscale = float(np.linalg.norm(C)) or 1.0
    C = C / fscale
    A = -np.asarray(Fs, dtype=complex)  # SDPT3 convention: C - sum y A = S
    b = -c
    p, n = A.shape[0], C.shape[0]
    max_iter = tol.sdp_max_iter if max_iter is None else max_iter
    reltol = tol.sdp_rel_gap * 1e-2
    feastol = tol.sdp_feas

    At = A.transpose(0, 2, 1).reshape(p, -1)  # Aop as one matrix-vector product

    def Aop(x):
        return (At @ x.reshape(-1)).real

    def ATop(y):
        return np.tensordot(y, A, axes=1)

    normC = max(1.0, np.linalg.norm(C))
    normb = max(1.0, np.linalg.norm(b))
    Anorm = max(1.0, max(np.linalg.norm(a) for a in A)) if p else 1.0
    scale = max(10.0, np.sqrt(n), normC, normb / Anorm)
    X = scale * np.eye(n, dtype=complex)
    y = np.zeros(p) if y0 is None else np.asarray(y0, dtype=float) / fscale
    S = C - ATop(y)
    if y0 is None or min_eig(S) <= 0:
        y = np.zeros(p)
        S = scale * np.eye(n, dtype=complex)

    it = 0
    stalled = 0
    converged = False
    # near the optimum of a degenerate problem the Newton system loses all
    # precision; keep the best iterate and stop once progress has ceased
    best, best_score, since_best = None, (True, np.inf), 0
    for it in range(1, max_iter + 1):
        Rp = b - Aop(X)
        Rd = _sym(C - S - ATop(y))
        mu = np.trace(X @ S).real / n
        pobj = np.trace(C @ X).real
        dobj = b @ y
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(Rp) / normb
        dinf = np.linalg.norm(Rd) / normC
        if relgap < reltol and pinf < feastol and dinf < feastol:
            converged = True
            break
        ok = relgap <= tol.sdp_rel_gap and pinf <= feastol and dinf <= feastol
        # valid certificates rank ahead of everything else
        score = (not ok, max(relgap / reltol, pinf / feastol, dinf / feastol))
        if score < best_score:
            best, best_score, since_best = (X, y), score, 0
        else:
            since_best += 1
            # give up on the tighter target only once a valid certificate is in hand
            if not best_score[0] and since_best >= 5:
                break

        try:
            Lx = np.linalg.cholesky(X)
            Ls = np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            break
        Lsi = solve_triangular(Ls, np.eye(n), lower=True)
        Sinv = _sym(Lsi.conj().T @ Lsi)
        # Schur complement M_ij = tr(A_i X A_j S^-1) = Re <K_i, K_j> with
        # K_i = Ls^-1 A_i Lx; a QR of K gives the Cholesky factor of M
        # without squaring its condition number
        K = (Lsi @ A @ Lx).reshape(p, -1)
        Rm = qr(np.hstack([K.real, K.imag]).T, mode="r")[0][:p]
        if np.min(np.abs(np.diag(Rm))) <= 1e-15 * np.max(np.abs(np.diag(Rm))):
            M = Rm.T @ Rm
            Mp = np.linalg.pinv(M, rcond=1e-14)
            solve = lambda r: Mp @ r  # noqa: E731
        else:
            solve = lambda r: solve_triangular(  # noqa: E731
                Rm, solve_triangular(Rm, r, trans="T"), lower=False
            )
        XRdSi = X @ Rd @ Sinv

        def direction(target):
            # target is the right-hand side of the linearized complementarity
            rhs = b - Aop(target @ Sinv) + Aop(XRdSi)
            dy = solve(rhs)
            dS = _sym(Rd - ATop(dy))
            dX = _sym((target - X @ dS) @ Sinv - X)
            return dX, dy, dS

        # predictor
        I = np.eye(n)
        dXp, dyp, dSp = direction(np.zeros((n, n)))
        ap = min(1.0, 0.98 * _max_step(X, dXp))
        ad = min(1.0, 0.98 * _max_step(S, dSp))
        mu_aff = np.trace((X + ap * dXp) @ (S + ad * dSp)).real / n
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        # corrector
        target = sigma * mu * I - dXp @ dSp
        dX, dy, dS = direction(target)
        ap = min(1.0, 0.98 * _max_step(X, dX))
        ad = min(1.0, 0.98 * _max_step(S, dS))
        stalled = stalled + 1 if max(ap, ad) < 1e-3 else 0
        if stalled >= 3:
            break
        X = _sym(X + ap * dX)
        y = y + ad * dy
        S = _sym(S + ad * dS)

    if not converged and best is not None:
        X, y = best
    res = LmiResult(
        y=fscale * y,
        S=fscale * _sym(C - ATop(y)),
        Z=cscale * X,
        primal=cscale * fscale * float(c @ y),
        dual=-cscale * fscale * float(np.trace(C @ X).real),
        iterations=it,
        converged=converged,
    )
    if not converged:
        gap = abs(res.primal - res.dual)
        if gap > tol.sdp_rel_gap * (1 + abs(res.primal)):
            raise NonConvergenceError(
                f"interior point method stalled after {it} iterations (gap {gap:.3e})", last=res
            )
        res.converged = True
    return res


def _unit(n, i, j=None, imag=False):
    e = np.zeros((n, n), dtype=complex)
    if j is None:
        e[i, i] = 1.0
    elif imag:
        e[i, j], e[j, i] = 1j, -1j
    else:
        e[i, j] = e[j, i] = 1.0
    return e


def _check_psd_input(p, tol):
    p = as_square(p, "P")
    if np.linalg.norm(p - p.conj().T) > tol.hermitian_error * max(1.0, np.linalg.norm(p)):
        raise NotHermitianError("P must be Hermitian")
    p = _sym(p)
    if min_eig(p) < -tol.psd_error * max(1.0, op_norm(p)):
        raise NotPSDError("P must be positive semidefinite")
    return p


def solve_diag_dominance(P, tol=DEFAULT_TOL):
    """``min sum(lam)  s.t.  diag(lam) >= P``; equals ``|P|_cbB`` for PSD ``P``.

    The certificate ``dual_matrix`` is the unit-diagonal PSD ``Q`` with
    ``Tr(PQ) = |P|_cbB``.
    """
    P = _check_psd_input(P, tol)
    n = P.shape[0]
    Fs = np.stack([_unit(n, i) for i in range(n)])
    y0 = np.full(n, op_norm(P) + 1.0)
    r = solve_lmi(np.ones(n), -P, Fs, tol=tol, y0=y0)
    lam = r.y
    return SdpSolution(
        primal_value=r.primal,
        dual_value=r.dual,
        primal_vars={"lam": lam},
        dual_matrix=r.Z,
        gap=abs(r.primal - r.dual),
        iterations=r.iterations,
    )


def _support(X, tol):
    scale = max(np.abs(X).max(), 1e-300)
    rows = np.flatnonzero(np.abs(X).max(axis=1) > tol.support * scale)
    cols = np.flatnonzero(np.abs(X).max(axis=0) > tol.support * scale)
    return rows, cols


def solve_two_sided_scaling(X, mode="cbb", tol=DEFAULT_TOL):
    """Diagonal-scaling programs on the block ``[[A, X], [X*, B]] >= 0``.

    ``mode="cbb"``: ``A = diag(a)``, ``B = diag(b)``, minimize
    ``(sum a + sum b)/2``; the value is ``|X|_cbB`` and the optimum has
    ``sum a = sum b``. ``dual_matrix`` is the PSD certificate with diagonal
    1/2; ``extra["witness"] = -2 Z12`` has ``|Y|_S <= 1`` and
    ``Re Tr(Y* X) = |X|_cbB``.

    ``mode="schur"``: ``A``, ``B`` full Hermitian with every diagonal entry
    equal to ``t``; minimize ``t``. The value is ``|X|_S`` and
    ``primal_vars["block"]`` is the optimal PSD block, whose Gram factor
    yields the Schur factorization.

    Zero rows and columns of ``X`` are removed before solving; their scaling
    entries are reported as 0.
    """
    X = as_matrix(X, "X")
    m, n = X.shape
    rows, cols = _support(X, tol)
    if rows.size == 0:
        raise DomainError("X must be nonzero")
    Xs = X[np.ix_(rows, cols)]
    ms, ns = Xs.shape
    N = ms + ns
    F0 = np.zeros((N, N), dtype=complex)
    F0[:ms, ms:] = Xs
    F0[ms:, :ms] = Xs.conj().T
    nrm = op_norm(Xs)
    if mode == "cbb":
        Fs = np.stack([_unit(N, i) for i in range(N)])
        c = np.full(N, 0.5)
        r = solve_lmi(c, F0, Fs, tol=tol, y0=np.full(N, nrm + 1.0))
        # the objective is flat to first order along a -> c a, b -> b / c;
        # rebalancing by congruence keeps the block PSD and cannot raise the value
        ys = r.y.copy()
        sa, sb = ys[:ms].sum(), ys[ms:].sum()
        if sa > 0 and sb > 0:
            c_ = np.sqrt(sb / sa)
            ys[:ms] *= c_
            ys[ms:] /= c_
        a = np.zeros(m)
        bb = np.zeros(n)
        a[rows] = ys[:ms]
        bb[cols] = ys[ms:]
        Z = np.zeros((m + n, m + n), dtype=complex)
        idx = np.concatenate([rows, m + cols])
        Z[np.ix_(idx, idx)] = r.Z
        W = np.zeros((m, n), dtype=complex)
        W[np.ix_(rows, cols)] = -2.0 * r.Z[:ms, ms:]
        return SdpSolution(
            primal_value=float(0.5 * ys.sum()),
            dual_value=r.dual,
            primal_vars={"a": a, "b": bb},
            dual_matrix=Z,
            gap=abs(0.5 * ys.sum() - r.dual),
            iterations=r.iterations,
            extra={"witness": W},
        )
    if mode == "schur":
        mats = [np.eye(N, dtype=complex)]
        for off, size in ((0, ms), (ms, ns)):
            for i in range(size):
                for j in range(i + 1, size):
                    mats.append(_unit(N, off + i, off + j))
                    mats.append(_unit(N, off + i, off + j, imag=True))
        Fs = np.stack(mats)
        c = np.zeros(len(mats))
        c[0] = 1.0
        y0 = np.zeros(len(mats))
        y0[0] = nrm + 1.0
        r = solve_lmi(c, F0, Fs, tol=tol, y0=y0)
        blk_s = r.S
        block = np.zeros((m + n, m + n), dtype=complex)
        idx = np.concatenate([rows, m + cols])
        block[np.ix_(idx, idx)] = blk_s
        # entries for removed rows/cols: unit-norm slack keeps the Gram columns bounded
        t = r.primal
        for k in range(m + n):
            if k not in set(idx.tolist()):
                block[k, k] = t
        Z = np.zeros((m + n, m + n), dtype=complex)
        Z[np.ix_(idx, idx)] = r.Z
        return SdpSolution(
            primal_value=r.primal,
            dual_value=r.dual,
            primal_vars={"t": t, "block": block},
            dual_matrix=Z,
            gap=abs(r.primal - r.dual),
            iterations=r.iterations,
        )
    raise ValueError(f"unknown mode {mode!r}")


def maximize_over_cbf_ball(X, tol=DEFAULT_TOL):
    """``max Re Tr(Y* X)`` over ``|Y|_cbF <= 1``; the value is ``|X|_T``.

    The ball is ``{Y : exists lam >= 0, sum lam <= 1, [[I, Y], [Y*, diag(lam)]] >= 0}``.
    The maximizer is returned as ``primal_vars["Y"]``.
    """
    X = as_matrix(X, "X")
    m, n = X.shape
    N = m + n + 1
    F0 = np.zeros((N, N), dtype=complex)
    F0[:m, :m] = np.eye(m)
    F0[-1, -1] = 1.0
    mats = []
    for i in range(m):
        for j in range(n):
            e = np.zeros((N, N), dtype=complex)
            e[i, m + j] = e[m + j, i] = 1.0
            mats.append(e)
    for i in range(m):
        for j in range(n):
            e = np.zeros((N, N), dtype=complex)
            e[i, m + j], e[m + j, i] = 1j, -1j
            mats.append(e)
    for j in range(n):
        e = np.zeros((N, N), dtype=complex)
        e[m + j, m + j] = 1.0
        e[-1, -1] = -1.0
        mats.append(e)
    Fs = np.stack(mats)
    c = np.concatenate([-X.real.ravel(), -X.imag.ravel(), np.zeros(n)])
    y0 = np.concatenate([np.zeros(2 * m * n), np.full(n, 0.5 / n)])
    r = solve_lmi(c, F0, Fs, tol=tol, y0=y0)
    Y = (r.y[: m * n] + 1j * r.y[m * n : 2 * m * n]).reshape(m, n)
    lam = r.y[2 * m * n :]
    return SdpSolution(
        primal_value=-r.primal,
        dual_value=-r.dual,
        primal_vars={"Y": Y, "lam": lam},
        dual_matrix=r.Z,
        gap=abs(r.primal - r.dual),
        iterations=r.iterations,
    )
