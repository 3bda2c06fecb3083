"""Dense complex linear algebra kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single entry point that validates shape and finiteness.
"""

from typing import NamedTuple

import numpy as np

from .config import DEFAULT_TOL, DimensionError, NotHermitianError, NotPSDError

__all__ = [
    "as_matrix",
    "as_square",
    "hs_norm",
    "op_norm",
    "phase",
    "diag_inv",
    "HermitianEig",
    "PolarDecomposition",
    "hermitian_eig",
    "jacobi_eig",
    "svd",
    "polar",
    "psd_sqrt",
    "is_psd",
    "min_eig",
    "gram_factor",
]


def as_matrix(x, name="matrix"):
    """Return ``x`` as a finite 2-D complex array (a copy is made only if needed)."""
    a = np.asarray(x, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_square(x, name="matrix"):
    a = as_matrix(x, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def hs_norm(a):
    return float(np.linalg.norm(a))


def op_norm(a):
    """Largest singular value."""
    return float(np.linalg.norm(a, 2))


def phase(z):
    """Entrywise z/|z|, with phase(0) = 1."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    out = np.ones_like(z)
    nz = r > 0
    # rescale by the larger component with real divisions first: complex
    # division by a subnormal modulus overflows to nan
    w = z[nz]
    big = np.maximum(np.abs(w.real), np.abs(w.imag))
    w = w.real / big + 1j * (w.imag / big)
    out[nz] = w / np.abs(w)
    return out


def diag_inv(v, tol=0.0):
    """Entrywise inverse on the support of ``v``, zero elsewhere."""
    v = np.asarray(v)
    out = np.zeros(v.shape, dtype=v.dtype)
    nz = np.abs(v) > tol
    out[nz] = 1.0 / v[nz]
    return out


def _hermitize(a, tol):
    a = as_square(a)
    asym = hs_norm(a - a.conj().T)
    if asym > tol.hermitian_error * max(1.0, hs_norm(a)):
        raise NotHermitianError(f"matrix is not Hermitian (|A - A*| = {asym:.3e})")
    return (a + a.conj().T) / 2


def _fix_phases(v):
    # first non-negligible coordinate of each column made real nonnegative
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12 * max(1.0, np.abs(col).max()))
        if idx.size:
            p = col[idx[0]]
            v[:, k] = col * (abs(p) / p)
            v[idx[0], k] = abs(p)
    return v


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class PolarDecomposition(NamedTuple):
    W: np.ndarray
    P: np.ndarray


def hermitian_eig(a, method="lapack", tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="jacobi"`` runs the cyclic Jacobi sweep in :func:`jacobi_eig`;
    the default uses LAPACK. Both return eigenvectors under the same phase
    convention.
    """
    h = _hermitize(a, tol)
    if method == "jacobi":
        w, v = jacobi_eig(h, tol.jacobi_offdiag)
    elif method == "lapack":
        w, v = np.linalg.eigh(h)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return HermitianEig(np.asarray(w, dtype=float), _fix_phases(v))


def jacobi_eig(a, offdiag_tol=1e-13, max_sweeps=100):
    """Cyclic complex Jacobi eigenvalue iteration for a Hermitian matrix.

    Sweeps until the off-diagonal Hilbert-Schmidt mass is below
    ``offdiag_tol * (1 + |A|_HS)``.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = 1.0 + hs_norm(a)
    for _ in range(max_sweeps):
        off = hs_norm(a - np.diag(np.diag(a)))
        if off <= offdiag_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                e = apq / r
                theta = 0.5 * np.arctan2(2 * r, app - aqq)
                c, s = np.cos(theta), np.sin(theta)
                # unitary acting on span(e_p, e_q); zeroes a[p, q]
                g = np.array([[c, -s * e], [s * np.conj(e), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def svd(x):
    """Thin SVD ``x = U diag(s) V*`` with ``s`` descending; returns ``(U, s, V)``."""
    x = as_matrix(x)
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    return u, s, vh.conj().T


def polar(b, tol=DEFAULT_TOL):
    """Polar decomposition ``B = W P`` with ``P = (B*B)^(1/2)``.

    ``W`` is the minimal partial isometry: it vanishes on the kernel of ``P``.
    """
    b = as_square(b)
    u, s, v = svd(b)
    keep = s > tol.gram_truncation * max(s[0], 1e-300)
    w = u[:, keep] @ v[:, keep].conj().T
    p = (v * s) @ v.conj().T
    return PolarDecomposition(w, (p + p.conj().T) / 2)


def min_eig(a):
    a = np.asarray(a)
    return float(np.linalg.eigvalsh((a + a.conj().T) / 2)[0])


def is_psd(a, tol=DEFAULT_TOL.eig_clamp):
    a = as_square(a)
    scale = max(1.0, op_norm(a))
    return min_eig(a) >= -tol * scale


def _psd_eig(p, tol):
    h = _hermitize(p, tol)
    w, v = np.linalg.eigh(h)
    scale = max(1.0, abs(w[-1]))
    if w[0] < -tol.psd_error * scale:
        raise NotPSDError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    return np.clip(w, 0.0, None), v


def psd_sqrt(p, tol=DEFAULT_TOL):
    """Principal square root of a PSD matrix; tiny negative eigenvalues clamp to 0."""
    w, v = _psd_eig(p, tol)
    s = (v * np.sqrt(w)) @ v.conj().T
    return (s + s.conj().T) / 2


def gram_factor(p, rel_cut=DEFAULT_TOL.gram_truncation, tol=DEFAULT_TOL):
    """Return ``G`` (k x n) with ``G* G = P``, dropping eigenvalues below ``rel_cut * lambda_max``."""
    w, v = _psd_eig(p, tol)
    keep = w > rel_cut * max(w[-1], 1e-300)
    g = (v[:, keep] * np.sqrt(w[keep])).conj().T
    return g[::-1]
