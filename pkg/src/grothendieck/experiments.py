"""Reproducible experiments: the block embedding, constant-ratio scans and the inequality suite.

Randomness is derived from a master seed by a splitmix64 counter, one 64-bit
seed per sample, so every sample can be regenerated on its own and reports
do not depend on evaluation order.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np

from . import __version__
from .config import DEFAULT_BUDGET, DEFAULT_TOL, KG_GENERAL_BOUND, KG_LITTLE, Budget, DomainError
from .factorizations import cbb_factorization, cbf_vector, duality_witness, fact_split, schur_factorization
from .haagerup import (
    cbb_bound_chain,
    eigen_and_determinant_checks,
    haagerup_construction,
    nonneg_closed_forms,
)
from .linalg import as_matrix, op_norm
from .norms import NormKind, norm, rank_one_closed_forms
from .sdp import solve_diag_dominance, solve_two_sided_scaling
from .torus import max_bilinear_torus, max_quadratic_torus

__all__ = [
    "splitmix64",
    "sample_seeds",
    "ENSEMBLES",
    "sample_matrix",
    "BlockEmbedding",
    "block_embedding",
    "RatioScanReport",
    "ratio_scan",
    "HIST_EDGES",
    "inequality_suite",
]

_MASK = (1 << 64) - 1
#: literature window for the complex Grothendieck constant, reported on general scans
LITERATURE_WINDOW = (1.338, 1.4049)
#: histogram buckets shared by all scans
HIST_EDGES = np.linspace(1.0, 1.8, 65)


def splitmix64(state):
    """One splitmix64 step; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def sample_seeds(master, count):
    """The first ``count`` splitmix64 outputs started from ``master``."""
    state = int(master) & _MASK
    out = []
    for _ in range(count):
        state, z = splitmix64(state)
        out.append(z)
    return out


def _cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


ENSEMBLES = ("ginibre", "gram", "nonnegative", "rank_one")


def sample_matrix(ensemble, shape, rng):
    """Draw an ``m x n`` sample.

    ``ginibre``: iid complex Gaussian. ``gram``: square Gram matrix of ``n``
    random complex unit vectors (an elliptope point). ``nonnegative``: iid
    uniform on ``[0, 1)``. ``rank_one``: outer product of two complex
    Gaussian vectors.
    """
    m, n = shape
    if ensemble == "ginibre":
        return _cgauss(rng, m, n)
    if ensemble == "gram":
        G = _cgauss(rng, n, n)
        G /= np.linalg.norm(G, axis=0)
        return G.conj().T @ G
    if ensemble == "nonnegative":
        return rng.random((m, n)).astype(complex)
    if ensemble == "rank_one":
        return np.outer(_cgauss(rng, m), _cgauss(rng, n))
    raise DomainError(f"unknown ensemble {ensemble!r}")


def _positive_sample(ensemble, n, rng):
    if ensemble == "gram":
        return sample_matrix("gram", (n, n), rng)
    if ensemble == "rank_one":
        mu = _cgauss(rng, n)
        return np.outer(mu, mu.conj())
    X = sample_matrix(ensemble, (n, n), rng)
    return X.conj().T @ X


# -- block embedding -------------------------------------------------------


@dataclass
class BlockEmbedding:
    """PSD pair built from ``X`` normalized to ``|X|_cbB = 1``.

    ``P = [[diag(eta)^2, X], [X*, diag(xi)^2]]`` from the cbB factorization
    and ``Q = [L R]* [L R]`` from a Schur factorization of the S-norm dual
    witness of ``X``. ``gamma = (eta, xi) / sqrt 2``.
    """

    X: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    gamma: np.ndarray
    scale: float  # |X|_cbB of the (trimmed) input
    rows: np.ndarray
    cols: np.ndarray
    checks: dict = field(default_factory=dict)


def block_embedding(X, budget=DEFAULT_BUDGET, tol=DEFAULT_TOL, verify=True):
    """Embed ``X`` into the PSD matrices ``P`` and ``Q``.

    Vanishing rows and columns are dropped with a warning. With ``verify``
    the checks below are stored in ``checks``:

    * ``trace_QP`` (should be 4) and ``cbb_P`` (should be 4),
    * ``schur_Q`` (should be 1),
    * ``B_P`` and ``predicted_B_P = 2 + 2 |X|_B`` as brackets, with
      ``B_P_consistent`` telling whether they overlap,
    * ``displayed_slack = (4/pi)(2 + 2 |X|_B) - 4`` using the best lower
      bound for ``|X|_B``; it is nonnegative in exact arithmetic.
    """
    X = as_matrix(X, "X")
    if not np.any(X):
        raise DomainError("X must be nonzero")
    cut = tol.support * np.abs(X).max()
    rows = np.flatnonzero(np.linalg.norm(X, axis=1) > cut)
    cols = np.flatnonzero(np.linalg.norm(X, axis=0) > cut)
    if rows.size < X.shape[0] or cols.size < X.shape[1]:
        warnings.warn("X has vanishing rows or columns; embedding the support only", stacklevel=2)
        X = X[np.ix_(rows, cols)]
    m, n = X.shape
    scale = float(solve_two_sided_scaling(X, "cbb", tol).primal_value)
    Xn = X / scale
    fac = cbb_factorization(Xn, tol)
    P = np.block([[np.diag(fac.eta**2).astype(complex), Xn], [Xn.conj().T, np.diag(fac.xi**2).astype(complex)]])
    P = (P + P.conj().T) / 2
    Y = duality_witness(Xn, "cbB-S", tol=tol)
    sf = schur_factorization(Y, tol)
    G = np.hstack([sf.L, sf.R])
    G = G / max(np.linalg.norm(G, axis=0).max(), 1e-300)  # diag(Q) <= 1
    Q = G.conj().T @ G
    Q = (Q + Q.conj().T) / 2
    gamma = np.concatenate([fac.eta, fac.xi]) / np.sqrt(2)
    emb = BlockEmbedding(Xn, P, Q, gamma, scale, rows, cols)
    if verify:
        c = emb.checks
        c["trace_QP"] = float(np.trace(Q @ P).real)
        c["cbb_P"] = float(solve_diag_dominance(P, tol).primal_value)
        c["schur_Q"] = float(solve_two_sided_scaling(Q, "schur", tol).primal_value)
        c["max_diag_Q"] = float(np.diag(Q).real.max())
        bp = max_quadratic_torus(P, budget, tol)
        bx = max_bilinear_torus(Xn, budget, tol)
        c["B_X"] = [bx.lower, bx.upper]
        c["B_P"] = [bp.lower, bp.upper]
        c["predicted_B_P"] = [2 + 2 * bx.lower, 2 + 2 * bx.upper]
        slack = 1e-6 * 4
        c["B_P_consistent"] = bool(bp.lower <= 2 + 2 * bx.upper + slack and 2 + 2 * bx.lower <= bp.upper + slack)
        c["displayed_slack"] = float(KG_LITTLE * (2 + 2 * bx.lower) - 4)
    return emb


# -- ratio scans -----------------------------------------------------------


@dataclass
class RatioScanReport:
    """Summary of a ratio scan; ``ratios[i]`` belongs to ``seeds[i]``."""

    kind: str
    ensemble: str
    shape: tuple
    seed: int
    ratios: np.ndarray
    seeds: list
    certified: np.ndarray  # torus maximum proven by the grid or the SDP bound
    bound: float
    argmax_matrix: np.ndarray = None
    context: dict = field(default_factory=dict)

    @property
    def samples(self):
        return len(self.ratios)

    @property
    def max_ratio(self):
        return float(np.max(self.ratios)) if self.samples else float("nan")

    @property
    def argmax(self):
        return int(np.argmax(self.ratios)) if self.samples else None

    @property
    def histogram(self):
        r = np.clip(self.ratios, HIST_EDGES[0], HIST_EDGES[-1])
        return np.histogram(r, HIST_EDGES)[0]

    @property
    def within_bound(self):
        return bool(np.all(self.ratios <= self.bound))

    def count_above(self, level):
        return int(np.sum(self.ratios > level))

    def to_dict(self):
        return {
            "kind": self.kind,
            "ensemble": self.ensemble,
            "shape": list(self.shape),
            "seed": self.seed,
            "samples": self.samples,
            "max_ratio": self.max_ratio if self.samples else None,
            "argmax": self.argmax,
            "argmax_seed": self.seeds[self.argmax] if self.samples else None,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "above_1e-3": self.count_above(1 + 1e-3),
            "certified": int(np.sum(self.certified)),
            "histogram": {"lo": 1.0, "hi": 1.8, "buckets": 64, "counts": self.histogram},
            "context": self.context,
        }


_SCAN_BOUNDS = {
    "positive": KG_LITTLE + 1e-3,
    "little": np.sqrt(KG_LITTLE) + 1e-3,
    "general": KG_GENERAL_BOUND + 1e-2,
}


def _scan_ratio(kind, A, budget, tol):
    """``(ratio, certified)``; the ratio uses the SDP upper value over the best torus lower bound."""
    if kind == "positive":
        top = solve_diag_dominance(A, tol).primal_value
        br = max_quadratic_torus(A, budget, tol)
        return top / br.lower, bool(br.info.get("certified"))
    if kind == "little":
        top = np.sqrt(solve_diag_dominance(A.conj().T @ A, tol).primal_value)
        br = max_quadratic_torus(A.conj().T @ A, budget, tol)
        return top / np.sqrt(br.lower), bool(br.info.get("certified"))
    top = solve_two_sided_scaling(A, "cbb", tol).primal_value
    br = max_bilinear_torus(A, budget, tol)
    return top / br.lower, bool(br.info.get("certified"))


def ratio_scan(kind, shape, count, seed=0, ensemble="ginibre", budget=DEFAULT_BUDGET, tol=DEFAULT_TOL):
    """Scan a constant ratio over random samples.

    ``positive``: ``|P|_cbB / |P|_B`` for PSD ``P`` (bounded by ``4/pi``);
    ``little``: ``|X|_cbF / |X|_F`` (bounded by ``sqrt(4/pi)``); ``general``:
    ``|X|_cbB / |X|_B`` (bounded by ``k / (2 - k) < 1.752``). Each bound is
    stored with its tolerance in ``bound``. ``shape`` is ``n`` or ``(m, n)``;
    positive scans are square. Every ratio is an upper estimate because the
    torus maximum in the denominator is a lower bound; ``certified`` marks
    samples where the grid or the SDP bound proved it exact.
    """
    if kind not in _SCAN_BOUNDS:
        raise DomainError(f"unknown scan kind {kind!r}")
    if count < 1:
        raise DomainError("count must be at least 1")
    if ensemble not in ENSEMBLES:
        raise DomainError(f"unknown ensemble {ensemble!r}")
    shape = (shape, shape) if np.isscalar(shape) else tuple(shape)
    if kind == "positive" and shape[0] != shape[1]:
        raise DomainError("positive scans need a square shape")
    seeds = sample_seeds(seed, count)
    ratios, cert = [], []
    best, best_A = -np.inf, None
    for s in seeds:
        rng = np.random.default_rng(s)
        if kind == "positive":
            A = _positive_sample(ensemble, shape[0], rng)
        else:
            A = sample_matrix(ensemble, shape, rng)
        r, c = _scan_ratio(kind, A, budget.with_(seed=s % (1 << 32)), tol)
        ratios.append(r)
        cert.append(c)
        if r > best:
            best, best_A = r, A
    context = {"literature_window": list(LITERATURE_WINDOW)} if kind == "general" else {}
    return RatioScanReport(
        kind, ensemble, shape, int(seed), np.asarray(ratios), seeds, np.asarray(cert), _SCAN_BOUNDS[kind], best_A, context
    )


# -- inequality suite ------------------------------------------------------


_SUITE_BUDGET = Budget(n_starts=16, n_rounding=16, grid_limit=3, cg_max_rounds=40)
_SDP_KINDS = {"op", "hs", "cbF", "cbB", "S", "T"}


class _Checks:
    def __init__(self):
        self.rows = []

    def le(self, name, sample, lhs, rhs, tol):
        lhs, rhs = float(lhs), float(rhs)
        self.rows.append((name, sample, lhs, rhs, rhs - lhs, lhs <= rhs + tol))

    def eq(self, name, sample, lhs, rhs, tol):
        lhs, rhs = float(lhs), float(rhs)
        d = abs(lhs - rhs)
        self.rows.append((name, sample, lhs, rhs, -d, d <= tol))

    def within(self, name, sample, value, bracket, tol):
        value = float(value)
        slack = min(value - bracket.lower, bracket.upper - value)
        self.rows.append((name, sample, value, float(bracket.lower), slack, bracket.contains(value, tol)))


def _family_rank_one(ck, k, rng, budget, tol, sizes):
    m, n = rng.integers(1, sizes + 1, size=2)
    mu, nu = _cgauss(rng, m), _cgauss(rng, n)
    X = np.outer(mu, nu)
    closed = rank_one_closed_forms(mu, nu)
    for kind in NormKind:
        br = norm(X, kind, budget, tol)
        ref = closed[kind.value]
        if kind.value in _SDP_KINDS:
            ck.eq(f"rank_one.{kind.value}", k, br.upper, ref, 1e-6 * ref)
        else:
            ck.within(f"rank_one.{kind.value}", k, ref, br, 1e-6 * ref)


def _family_nonnegative(ck, k, rng, budget, tol, sizes):
    m, n = rng.integers(1, sizes + 1, size=2)
    X = sample_matrix("nonnegative", (m, n), rng)
    ref = nonneg_closed_forms(X)["cbf_norm"]
    ck.eq("nonnegative.cbF_closed_form", k, norm(X, "cbF", budget, tol).upper, ref, 1e-6 * ref)
    ck.within("nonnegative.F_closed_form", k, ref, norm(X, "F", budget, tol), 1e-6 * ref)
    xi_sdp, _ = cbf_vector(X, tol)
    xi_h = haagerup_construction(X, budget, tol).xi
    ck.eq("nonnegative.haagerup_vector", k, np.abs(xi_h - xi_sdp).max(), 0.0, 1e-5)


def _family_haagerup(ck, k, rng, budget, tol, sizes):
    n = int(rng.integers(1, min(sizes, 4) + 1))
    m = int(rng.integers(1, sizes + 1))
    X = sample_matrix("ginibre", (m, n), rng)
    d = haagerup_construction(X, budget, tol)
    if not d.certified:
        return
    f2 = float(np.sum(d.lam))
    ck.le("haagerup.Z_norm", k, op_norm(d.Z), np.sqrt(2), 1e-3)
    rep = eigen_and_determinant_checks(X, d, tol)
    ck.le("haagerup.eigen_residual", k, rep["eigen_residual"], 1e-6 * f2, 0.0)
    ck.le("haagerup.det_lambda", k, rep["det_lambda_rel"], 1e-6, 0.0)
    if rep["det_cbb_rel"] is not None:
        ck.le("haagerup.det_cbb", k, rep["det_cbb_rel"], 1e-6, 0.0)


def _family_cbb_chain(ck, k, rng, budget, tol, sizes):
    m, n = rng.integers(1, sizes + 1, size=2)
    ens = ("ginibre", "nonnegative")[k % 2]
    X = sample_matrix(ens, (m, n), rng)
    ch = cbb_bound_chain(X, tol)
    sl = 1e-8 * max(1.0, ch["upper"])
    ck.le("cbb_chain.trace_le_cbb", k, ch["trace"], ch["cbb"], sl)
    ck.le("cbb_chain.cbb_le_middle", k, ch["cbb"], ch["middle_sum"], sl)
    ck.le("cbb_chain.middle_le_upper", k, ch["middle_sum"], ch["upper"], sl)
    if ens == "nonnegative":
        ck.eq("cbb_chain.nonnegative_equality", k, ch["cbb"], ch["middle_sum"], 1e-6 * ch["cbb"])


def _family_duality(ck, k, rng, budget, tol, sizes):
    n = int(rng.integers(1, sizes + 1))
    P = _positive_sample("ginibre", n, rng)
    sol = solve_diag_dominance(P, tol)
    Qw = sol.dual_matrix
    ck.eq("duality.trace_QP_cbB", k, np.trace(Qw @ P).real, sol.primal_value, 1e-5 * sol.primal_value)
    br = max_quadratic_torus(P, budget, tol)
    u = br.witness
    R = np.outer(u, np.conj(u))
    ck.eq("duality.trace_RP_B", k, np.trace(R @ P).real, br.lower, 1e-5 * br.lower)


def _family_fact_split(ck, k, rng, budget, tol, sizes):
    m, n = rng.integers(1, sizes + 1, size=2)
    X = sample_matrix("ginibre", (m, n), rng)
    fs = fact_split(X, tol)
    nx = np.linalg.norm(X)
    ck.le("fact_split.residual", k, np.linalg.norm(X - fs.matrix()) / nx, 1e-7, 0.0)
    cbb = fs.factorization.value
    c2 = norm(fs.C, "cbF", budget, tol).upper ** 2
    d2 = norm(fs.D.conj().T, "cbF", budget, tol).upper ** 2
    ck.eq("fact_split.C_cbF", k, c2, cbb, 1e-5 * cbb)
    ck.eq("fact_split.Dstar_cbF", k, d2, cbb, 1e-5 * cbb)


def _family_embedding(ck, k, rng, budget, tol, sizes):
    m, n = rng.integers(1, min(sizes, 4) + 1, size=2)
    X = sample_matrix("ginibre", (m, n), rng)
    c = block_embedding(X, budget, tol).checks
    ck.eq("embedding.cbb_P", k, c["cbb_P"], 4.0, 1e-5 * 4)
    ck.eq("embedding.trace_QP", k, c["trace_QP"], 4.0, 1e-5 * 4)
    ck.eq("embedding.schur_Q", k, c["schur_Q"], 1.0, 1e-6)
    ck.le("embedding.B_P_consistent", k, 0.0 if c["B_P_consistent"] else 1.0, 0.0, 0.0)
    ck.le("embedding.displayed", k, 4.0, 4.0 + c["displayed_slack"], 1e-6)


def _family_little(ck, k, rng, budget, tol, sizes):
    m, n = rng.integers(1, sizes + 1, size=2)
    X = sample_matrix(("ginibre", "nonnegative", "rank_one")[k % 3], (m, n), rng)
    r, _ = _scan_ratio("little", X, budget, tol)
    ck.le("little.cbF_over_F", k, r, np.sqrt(KG_LITTLE), 1e-3)


def _family_positive(ck, k, rng, budget, tol, sizes):
    n = int(rng.integers(1, sizes + 1))
    P = _positive_sample(("gram", "ginibre", "rank_one")[k % 3], n, rng)
    r, _ = _scan_ratio("positive", P, budget, tol)
    ck.le("positive.cbB_over_B", k, r, KG_LITTLE, 1e-3)


def _family_general(ck, k, rng, budget, tol, sizes):
    m, n = rng.integers(1, min(sizes, 3) + 1, size=2)
    X = sample_matrix("ginibre", (m, n), rng)
    r, _ = _scan_ratio("general", X, budget, tol)
    ck.le("general.cbB_over_B", k, r, KG_GENERAL_BOUND, 1e-2)
    s = norm(X, "S", budget, tol).upper
    proj = norm(X, "proj_inf_inf", budget, tol).upper
    ck.le("general.proj_inf_inf_over_S", k, proj, KG_GENERAL_BOUND * s, 1e-6 * s)


#: family name -> (runner, share of the per-family sample count)
_FAMILIES = {
    "rank_one": (_family_rank_one, 1.0),
    "nonnegative": (_family_nonnegative, 1.0),
    "haagerup": (_family_haagerup, 1.0),
    "cbb_chain": (_family_cbb_chain, 1.0),
    "duality": (_family_duality, 1.0),
    "fact_split": (_family_fact_split, 1.0),
    "embedding": (_family_embedding, 1.0),
    "little": (_family_little, 1.0),
    "positive": (_family_positive, 1.0),
    "general": (_family_general, 0.5),
}


def inequality_suite(seed=42, samples=50, max_size=5, budget=None, tol=DEFAULT_TOL, families=None):
    """Run every family of checks and return a report dictionary.

    ``samples`` is the per-family count (the projective-norm and embedding
    families, which are much more expensive, run a fixed fraction of it).
    Each named check is aggregated into its sample count, worst slack and
    pass flag; failing individual rows are listed under ``failures``. The
    report contains no timings, so serializing it with
    :func:`grothendieck.io.dumps` is byte-reproducible.
    """
    budget = budget or _SUITE_BUDGET
    names = list(_FAMILIES) if families is None else list(families)
    for f in names:
        if f not in _FAMILIES:
            raise DomainError(f"unknown family {f!r}")
    ck = _Checks()
    fam_seeds = dict(zip(_FAMILIES, sample_seeds(seed, len(_FAMILIES))))
    for f in names:
        runner, share = _FAMILIES[f]
        count = int(np.ceil(samples * share)) if samples > 0 else 0
        for k, s in enumerate(sample_seeds(fam_seeds[f], count)):
            rng = np.random.default_rng(s)
            runner(ck, k, rng, budget.with_(seed=s % (1 << 32)), tol, max_size)
    checks = {}
    failures = []
    for name, sample, lhs, rhs, slack, ok in ck.rows:
        c = checks.setdefault(name, {"name": name, "count": 0, "min_slack": None, "worst_sample": None, "pass": True})
        c["count"] += 1
        if c["min_slack"] is None or slack < c["min_slack"]:
            c["min_slack"], c["worst_sample"] = slack, sample
        if not ok:
            c["pass"] = False
            failures.append({"name": name, "sample": sample, "lhs": lhs, "rhs": rhs, "slack": slack})
    return {
        "tool": "grothendieck",
        "version": __version__,
        "command": "inequality_suite",
        "seed": int(seed),
        "samples": int(samples),
        "max_size": int(max_size),
        "families": names,
        "checks": list(checks.values()),
        "failures": failures,
        "status": "pass" if not failures else "fail",
    }
