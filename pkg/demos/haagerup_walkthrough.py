"""Phase vector, state masses and the normalized factor for two matrices."""

import numpy as np

from grothendieck import cbf_vector, haagerup_construction, norm
from grothendieck.haagerup import cbb_bound_chain, eigen_and_determinant_checks, nonneg_closed_forms
from grothendieck.linalg import op_norm


def walk(X, title):
    print(title)
    d = haagerup_construction(X)
    print("  u      ", np.round(d.u, 4))
    print("  lambda ", np.round(d.lam, 4))
    print("  xi     ", np.round(d.xi, 4))
    print(f"  F = {d.f_norm:.6f}, |Z| = {op_norm(d.Z):.6f} (<= sqrt 2), certified {d.certified}")
    cbf = norm(X, "cbF").upper
    # the construction's scaling versus the optimal one
    print(f"  cbF = {cbf:.6f}, |X diag(xi)^-1| = {d.scaled_norm:.6f}, gap {d.scaled_norm - cbf:.2e}")
    r = eigen_and_determinant_checks(X, d)
    print(f"  eigen residual {r['eigen_residual_rel']:.1e}, det residuals {r['det_lambda_rel']:.1e}")
    return d


def main():
    rng = np.random.default_rng(3)
    A = rng.random((4, 3))
    d = walk(A, "nonnegative 4 x 3")
    closed = nonneg_closed_forms(A)
    print(f"  closed form F = cbF = {closed['f_norm']:.6f}")
    xi_sdp, _ = cbf_vector(A)
    print(f"  SDP scaling vector matches: {np.allclose(d.xi, xi_sdp, atol=1e-5)}")
    print("  bound chain:", cbb_bound_chain(A))

    X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    walk(X, "complex 3 x 3")


if __name__ == "__main__":
    main()
