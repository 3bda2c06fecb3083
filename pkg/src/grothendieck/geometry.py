"""Elliptope decompositions ``Q = alpha R - P``.

``Q`` ranges over the elliptope (PSD, unit diagonal) and ``R`` over the
convex hull of the rank-one elliptope points ``conj(u) u^T`` with ``u``
unimodular. For ``alpha >= 4/pi`` every ``Q`` is ``alpha R - P`` with ``P``
PSD; :func:`decompose_geo` finds such an ``R`` by Frank-Wolfe ascent on
``lambda_min(alpha R - Q)``. Iterating on the remainder gives the signed
two-mixture form of :func:`decompose_geo2`, and reading off an off-diagonal
corner gives :func:`v_membership`, an explicit decomposition of a
unit-Schur-norm matrix into unimodular rank-one atoms.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_BUDGET, DEFAULT_TOL, KG_LITTLE, DomainError, NonConvergenceError
from .factorizations import schur_factorization
from .linalg import as_matrix, as_square, phase
from .norms import AtomMixtureV, norm
from .sdp import solve_lmi
from .torus import quadratic_search

__all__ = [
    "RAtomMixture",
    "GeoDecomposition",
    "Geo2Decomposition",
    "elliptope_check",
    "linear_oracle",
    "decompose_geo",
    "decompose_geo2",
    "v_membership",
    "alpha_feasibility",
    "random_elliptope",
]


@dataclass
class RAtomMixture:
    """Convex combination ``R = sum_k w_k conj(u_k) u_k^T`` of unimodular rank-ones.

    ``atoms`` has one unimodular vector per row, normalized so that the first
    entry is 1.
    """

    atoms: np.ndarray  # (k, n)
    weights: np.ndarray  # (k,)

    def matrix(self):
        U = self.atoms
        R = (np.conj(U).T * self.weights) @ U
        return (R + R.conj().T) / 2

    def __len__(self):
        return len(self.weights)

    @classmethod
    def identity(cls, n):
        """Uniform mixture over sign patterns (rows of a Hadamard matrix); implies ``I``."""
        from .norms import hadamard

        h = hadamard(n)[:, :n]
        return cls(h.astype(complex), np.full(h.shape[0], 1.0 / h.shape[0]))


@dataclass
class GeoDecomposition:
    """``alpha R - Q = P``; ``P`` is clamped to the PSD cone for reporting."""

    alpha: float
    R: RAtomMixture
    P: np.ndarray
    min_eig_achieved: float
    status: str
    iterations: int
    history: list = field(default_factory=list)
    raw_remainder: np.ndarray = None  # alpha R - Q before clamping


@dataclass
class Geo2Decomposition:
    """``Q ~ c_plus R_plus - c_minus R_minus`` with ``c_plus - c_minus = 1``."""

    alpha: float
    R_plus: RAtomMixture
    R_minus: RAtomMixture
    c_plus: float
    c_minus: float
    residual: float
    depth: int
    status: str
    failed_depth: int = None
    level_min_eigs: list = field(default_factory=list)


def random_elliptope(n, rng, rank=None):
    """Gram matrix of ``n`` random complex unit vectors in dimension ``rank``."""
    k = n if rank is None else rank
    g = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
    g /= np.linalg.norm(g, axis=0)
    Q = g.conj().T @ g
    return (Q + Q.conj().T) / 2


def elliptope_check(Q, tol=1e-8):
    """Raise :class:`DomainError` unless ``Q`` is PSD with unit diagonal."""
    Q = as_square(Q, "Q")
    if np.linalg.norm(Q - Q.conj().T) > tol * max(1.0, np.linalg.norm(Q)):
        raise DomainError("Q must be Hermitian")
    Q = (Q + Q.conj().T) / 2
    if np.abs(np.diag(Q) - 1).max() > tol:
        raise DomainError("Q must have unit diagonal")
    if np.linalg.eigvalsh(Q)[0] < -DEFAULT_TOL.psd_error:
        raise DomainError("Q must be positive semidefinite")
    return Q


def linear_oracle(v):
    """Unimodular ``u`` maximizing ``v* conj(u) u^T v = |u^T v|^2``; returns ``(u, |v|_1^2)``."""
    u = np.conj(phase(v))
    return u * np.conj(u[0]), float(np.abs(v).sum() ** 2)


def _lam_min(a):
    return np.linalg.eigvalsh(a)[0]


def _golden_max(f, probes=40):
    """Maximize a unimodal ``f`` on ``[0, 1]`` with ``probes`` evaluations."""
    g = (np.sqrt(5) - 1) / 2
    a, b = 0.0, 1.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(probes - 2):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _merge(atoms, weights, u, w_new):
    # merge with an existing atom within phase distance 1e-6
    if atoms:
        diffs = np.abs(np.asarray(atoms) - u).max(axis=1)
        j = int(np.argmin(diffs))
        if diffs[j] < 1e-6:
            weights[j] += w_new
            return
    atoms.append(u)
    weights.append(w_new)


def _corrective(Q, alpha, atoms, tol):
    """Re-weight the atoms: ``max t  s.t.  alpha sum w_k A_k - Q >= t I``, ``w`` in the simplex.

    Returns ``(weights, S)`` with ``S`` the dual PSD matrix (trace 1) that
    prices new atoms, or ``None`` if the solver fails.
    """
    U = np.asarray(atoms)
    k, n = U.shape
    N = n + k  # PSD block plus k nonnegativity slacks on the diagonal
    A = np.einsum("ki,kj->kij", np.conj(U), U)
    F0 = np.zeros((N, N), dtype=complex)
    F0[:n, :n] = alpha * A[-1] - Q
    F0[N - 1, N - 1] = 1.0
    # variables: t, then w_1..w_(k-1); w_k = 1 - sum of the others
    Fs = np.zeros((k, N, N), dtype=complex)
    Fs[0, :n, :n] = -np.eye(n)
    for i in range(k - 1):
        Fs[i + 1, :n, :n] = alpha * (A[i] - A[-1])
        Fs[i + 1, n + i, n + i] = 1.0
        Fs[i + 1, N - 1, N - 1] = -1.0
    c = np.zeros(k)
    c[0] = -1.0
    R0 = A.mean(axis=0)
    y0 = np.concatenate([[_lam_min(alpha * R0 - Q) - 1.0], np.full(k - 1, 1.0 / k)])
    try:
        r = solve_lmi(c, F0, Fs, tol=tol, y0=y0)
    except NonConvergenceError as e:
        r = e.last
        if r is None:
            return None
    w = np.concatenate([r.y[1:], [1.0 - r.y[1:].sum()]])
    w = np.clip(w, 0.0, None)
    S = r.Z[:n, :n]
    return w / w.sum(), (S + S.conj().T) / 2


def _mixture_matrix(atoms, weights):
    U = np.asarray(atoms)
    R = (np.conj(U).T * np.asarray(weights)) @ U
    return (R + R.conj().T) / 2


def _price(S, budget, tol, seed, count=4):
    # atoms conj(u) u^T maximizing Tr(S conj(u) u^T) = w* S w with w = conj(u)
    b = budget.with_(grid_limit=0, n_rounding=0, n_starts=8, seed=seed)
    _, _, info = quadratic_search(S, b, tol, grid=False)
    W, obj = info["candidates"]
    out = []
    for j in np.argsort(-obj, kind="stable")[: 4 * count]:
        u = np.conj(W[:, j])
        u = u * np.conj(u[0])
        if all(np.abs(u - v).max() > 1e-6 for v in out):
            out.append(u)
        if len(out) >= count:
            break
    return out


def _as_atom(Q):
    """The unimodular ``u`` with ``Q = conj(u) u^T`` if ``Q`` is a single atom, else None."""
    w, V = np.linalg.eigh(Q)
    n = Q.shape[0]
    if n > 1 and w[-2] > 1e-10 * n:
        return None
    u, _ = linear_oracle(V[:, -1])
    if np.abs(np.outer(np.conj(u), u) - Q).max() > 1e-9:
        return None
    return u


def _fw(Q, alpha, budget, tol, target, init=None, corrective_every=25, max_atoms=None, patience=5):
    n = Q.shape[0]
    u = _as_atom(Q) if init is None else None
    if u is not None:
        # R = Q leaves alpha R - Q = (alpha - 1) Q, which is PSD and singular for n > 1
        val = alpha - 1.0 if n == 1 else 0.0
        if val >= target:
            return RAtomMixture(u[None, :], np.ones(1)), val, 0, [val]
    R0 = init if init is not None else RAtomMixture.identity(n)
    atoms = [a for a in R0.atoms]
    weights = list(R0.weights)
    R = R0.matrix()
    M = alpha * R - Q
    val = _lam_min(M)
    history = [val]
    max_atoms = max_atoms or 4 * n * n
    idle = 0
    it = 0
    for it in range(1, budget.fw_iters + 1):
        if val >= target:
            break
        w, V = np.linalg.eigh(M)
        u, _ = linear_oracle(V[:, 0])
        A = np.outer(np.conj(u), u)

        def f(g):
            return _lam_min(M + g * alpha * (A - R))

        g, fg = _golden_max(f, 40)
        gain = fg - val
        if gain > 0:
            weights = [x * (1 - g) for x in weights]
            _merge(atoms, weights, u, g)
            R = (1 - g) * R + g * A
            M = alpha * R - Q
            val = _lam_min(M)
        stalled = gain <= 1e-9 * max(1.0, abs(val))
        # a stalled step means a multiple bottom eigenvalue: re-weight the
        # active atoms exactly and price new ones against the dual matrix
        if corrective_every and (stalled or it % corrective_every == 0):
            before = val
            res = _corrective(Q, alpha, atoms, tol)
            if res is not None:
                wts, S = res
                Rc = _mixture_matrix(atoms, wts)
                vc = _lam_min(alpha * Rc - Q)
                if vc >= val:
                    keep = wts > 1e-12
                    atoms = [a for a, k in zip(atoms, keep) if k]
                    weights = list(wts[keep])
                    R = Rc
                    M = alpha * R - Q
                    val = vc
                if len(atoms) > max_atoms:
                    order = np.sort(np.argsort(weights, kind="stable")[::-1][:max_atoms])
                    atoms = [atoms[i] for i in order]
                    ws = np.array([weights[i] for i in order])
                    weights = list(ws / ws.sum())
                    R = _mixture_matrix(atoms, weights)
                    M = alpha * R - Q
                    val = _lam_min(M)
                if val < target:
                    for u2 in _price(S, budget, tol, budget.seed + it):
                        _merge(atoms, weights, u2, 0.0)
                    wb, Vb = np.linalg.eigh(M)
                    for j in range(n):
                        if wb[j] <= wb[0] + 1e-6 * max(1.0, abs(wb[0])):
                            _merge(atoms, weights, linear_oracle(Vb[:, j])[0], 0.0)
            idle = idle + 1 if val <= before + 1e-12 * max(1.0, abs(val)) else 0
            if idle >= patience:
                break
        history.append(val)
    keep = np.asarray(weights) > 0
    mix = RAtomMixture(np.asarray(atoms)[keep], np.asarray(weights)[keep])
    return mix, val, it, history


def decompose_geo(Q, alpha=KG_LITTLE, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL, target=0.0):
    """Find ``R`` in the rank-one hull with ``lambda_min(alpha R - Q)`` as large as possible.

    Frank-Wolfe over the atoms ``conj(u) u^T``: the linear oracle for the
    bottom eigenvector ``v`` is ``u = conj(phase(v))`` (value ``|v|_1^2``),
    the step is a golden-section search of the concave ``lambda_min`` along
    the segment, and every few steps the weights of the active atoms are
    re-optimized exactly by a small SDP. Stops once ``lambda_min >= target``.

    ``status`` is ``"ok"`` when ``lambda_min >= -tol.feas_tol``.
    """
    Q = elliptope_check(Q)
    if alpha < 1:
        raise DomainError("alpha must be at least 1")
    budget.validate()
    mix, val, it, history = _fw(Q, alpha, budget, tol, target)
    raw = alpha * mix.matrix() - Q
    raw = (raw + raw.conj().T) / 2
    w, V = np.linalg.eigh(raw)
    P = (V * np.clip(w, 0.0, None)) @ V.conj().T
    status = "ok" if val >= -tol.feas_tol else "infeasible_within_budget"
    return GeoDecomposition(alpha, mix, (P + P.conj().T) / 2, float(val), status, it, history, raw)


def _to_elliptope(P):
    """Clamp to PSD and rescale to unit diagonal.

    The recursion divides by ``alpha - 1`` at every level, which amplifies
    rounding in the remainder geometrically; projecting back keeps each level
    a genuine elliptope point, and the error made at level ``k`` enters the
    final identity only with weight ``(alpha - 1)^k``.
    """
    P = (P + P.conj().T) / 2
    w, V = np.linalg.eigh(P)
    if w[0] < 0:
        P = (V * np.clip(w, 0.0, None)) @ V.conj().T
    d = np.sqrt(np.clip(np.diag(P).real, 1e-300, None))
    P = P / np.outer(d, d)
    P = (P + P.conj().T) / 2
    np.fill_diagonal(P, 1.0)
    return P


def _geo2_weights(alpha, depth):
    k = np.arange(1, depth + 1)
    return alpha * (alpha - 1) ** (k - 1)


def decompose_geo2(Q, alpha=KG_LITTLE, depth=40, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL):
    """Signed two-mixture decomposition ``Q = c+ R+ - c- R-``.

    Level ``k`` writes ``Q_k = alpha R_k - (alpha - 1) Q_(k+1)`` with
    ``Q_(k+1)`` the remainder projected back onto the elliptope, so that
    ``Q = sum_k (-1)^(k-1) alpha (alpha-1)^(k-1) R_k`` up to a tail of size
    ``(alpha - 1)^depth``. Odd levels form ``R+`` and even levels ``R-``; the
    reported residual is measured against the limiting coefficients
    ``1/(2 - alpha)`` and ``(alpha - 1)/(2 - alpha)``. A level whose
    Frank-Wolfe search ends below ``-tol.feas_tol`` stops the recursion and is
    recorded in ``failed_depth``.
    """
    Q0 = elliptope_check(Q)
    if not 1 < alpha < 2:
        raise DomainError("alpha must lie strictly between 1 and 2")
    n = Q0.shape[0]
    coef = _geo2_weights(alpha, depth)
    Qk = Q0
    plus, minus = [], []
    level_mins = []
    failed = None
    for k in range(depth):
        # cold starts: warm-starting from the previous level bloats the atom
        # pool and makes the corrective SDPs far slower
        mix, val, _, _ = _fw(Qk, alpha, budget, tol, 0.0)
        level_mins.append(float(val))
        (plus if k % 2 == 0 else minus).append((coef[k], mix))
        if val < -tol.feas_tol:
            # the remainder has left the elliptope; deeper levels would diverge
            failed = k + 1
            break
        Qk = _to_elliptope((alpha * mix.matrix() - Qk) / (alpha - 1))

    def combine(parts):
        if not parts:
            return RAtomMixture.identity(n), 0.0
        total = sum(c for c, _ in parts)
        atoms = np.vstack([m.atoms for _, m in parts])
        weights = np.concatenate([c * m.weights for c, m in parts]) / total
        return RAtomMixture(atoms, weights), total

    Rp, _ = combine(plus)
    Rm, _ = combine(minus)
    c_plus, c_minus = 1.0 / (2 - alpha), (alpha - 1) / (2 - alpha)
    residual = float(np.linalg.norm(Q0 - c_plus * Rp.matrix() + c_minus * Rm.matrix()))
    status = "ok" if failed is None else "failed"
    return Geo2Decomposition(alpha, Rp, Rm, c_plus, c_minus, residual, depth, status, failed, level_mins)


def v_membership(
    X, alpha=KG_LITTLE, depth=40, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL, check_norm=True, refine=True
):
    """Write ``X`` (with ``|X|_S = 1``) as ``sum_k c_k s_k t_k^T``, ``s``, ``t`` unimodular.

    The Schur factorization ``X = L* R`` with unit columns gives the elliptope
    point ``Q = [L R]* [L R]`` whose upper-right corner is ``X``;
    :func:`decompose_geo2` splits ``Q`` into two atom mixtures and the
    corners of the atoms ``conj(u) u^T`` with ``u = (s; t)`` are the
    unimodular rank-ones ``conj(s) t^T``. The gauge ``rho = sum |c_k|``
    equals ``alpha / (2 - alpha)``.

    With ``refine`` the column-generation representation behind the
    projective (inf, inf) norm is also computed (a few rounds only) and
    returned instead when it reconstructs ``X`` and has a smaller gauge; for
    matrices that are themselves cheap combinations of atoms, such as
    ``e_11``, this brings ``rho`` down to the true gauge. ``source`` says
    which representation was kept.
    """
    X = as_matrix(X, "X")
    m, n = X.shape
    fac = schur_factorization(X, tol)
    if check_norm and abs(fac.value - 1) > 1e-6:
        raise DomainError(f"X must have unit Schur multiplier norm (got {fac.value:.8f})")
    G = np.hstack([fac.L, fac.R])
    G = G / np.linalg.norm(G, axis=0)  # exact unit columns
    Q = G.conj().T @ G
    Q = (Q + Q.conj().T) / 2
    np.fill_diagonal(Q, 1.0)
    d = decompose_geo2(Q, alpha, depth, budget, tol)
    left, right, coef = [], [], []
    for mix, c, sign in ((d.R_plus, d.c_plus, 1.0), (d.R_minus, d.c_minus, -1.0)):
        for u, w in zip(mix.atoms, mix.weights):
            if w <= 0:
                continue
            left.append(sign * np.conj(u[:m]))
            right.append(u[m:])
            coef.append(c * w)
    mixture = AtomMixtureV(np.asarray(left), np.asarray(right), np.asarray(coef))
    recon = float(np.linalg.norm(X - mixture.matrix()))
    source = "geo2"
    if refine:
        br = norm(X, "proj_inf_inf", budget.with_(cg_max_rounds=min(budget.cg_max_rounds, 30)), tol)
        alt = br.witness
        if isinstance(alt, AtomMixtureV) and len(alt):
            err = float(np.linalg.norm(X - alt.matrix()))
            # the LP reconstructs only to its feasibility tolerance
            if err <= max(recon, 1e-6 * max(1.0, np.linalg.norm(X))) and alt.gauge < mixture.gauge:
                mixture, recon, source = alt, err, "column_generation"
    return {
        "rho": mixture.gauge,
        "mixture": mixture,
        "reconstruction_error": recon,
        "geo2": d,
        "status": d.status,
        "source": source,
    }


def alpha_feasibility(Q, alpha, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL, two_sided=False):
    """Is ``Q`` in ``alpha R - PSD`` (or, with ``two_sided``, ``alpha R1 - (alpha-1) R2``)?

    The one-sided test wraps :func:`decompose_geo`. The two-sided variant is
    exploratory: Frank-Wolfe on ``|alpha R1 - (alpha-1) R2 - Q|_HS^2`` with
    the atom oracles solved heuristically by torus search.
    """
    Q = elliptope_check(Q)
    if not two_sided:
        d = decompose_geo(Q, alpha, budget, tol)
        return {"feasible": d.status == "ok", "min_eig_achieved": d.min_eig_achieved, "decomposition": d}
    if alpha <= 1:
        raise DomainError("the two-sided variant needs alpha > 1")
    n = Q.shape[0]
    R1 = RAtomMixture.identity(n).matrix()
    R2 = R1.copy()
    a1, a2 = [], []
    sb = budget.with_(grid_limit=0, n_starts=min(budget.n_starts, 8))
    res = np.inf
    for it in range(1, budget.fw_iters + 1):
        E = alpha * R1 - (alpha - 1) * R2 - Q
        res = float(np.linalg.norm(E))
        if res <= tol.feas_tol:
            break
        # descent atoms: minimize Tr(E A1) and maximize Tr(E A2)
        _, u1, _ = quadratic_search(-np.conj(E), sb.with_(seed=budget.seed + it), tol, grid=False)
        _, u2, _ = quadratic_search(np.conj(E), sb.with_(seed=budget.seed + it + 1), tol, grid=False)
        A1 = np.outer(np.conj(u1), u1)
        A2 = np.outer(np.conj(u2), u2)
        D = alpha * (A1 - R1) - (alpha - 1) * (A2 - R2)
        dd = float(np.real(np.vdot(D, D)))
        if dd <= 0:
            break
        g = float(np.clip(-np.real(np.vdot(D, E)) / dd, 0.0, 1.0))
        if g <= 0:
            break
        R1 = (1 - g) * R1 + g * A1
        R2 = (1 - g) * R2 + g * A2
        a1.append(u1)
        a2.append(u2)
    P2 = alpha * R1 - Q
    return {
        "feasible": res <= tol.feas_tol,
        "residual": res,
        "min_eig_achieved": float(_lam_min((P2 + P2.conj().T) / 2)),
        "R1": R1,
        "R2": R2,
    }
