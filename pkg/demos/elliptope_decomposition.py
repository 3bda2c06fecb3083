"""Split a correlation matrix into unimodular rank-one atoms and a PSD remainder."""

import numpy as np

from grothendieck import KG_LITTLE, decompose_geo, decompose_geo2, norm, v_membership
from grothendieck.geometry import random_elliptope


def main():
    rng = np.random.default_rng(11)
    Q = random_elliptope(4, rng)
    print("Q =\n", np.round(Q, 3))

    d = decompose_geo(Q, 1.35)
    print(f"alpha R - Q is PSD: status {d.status}, min eigenvalue {d.min_eig_achieved:.4f}")
    print(f"  {len(d.R.weights)} atoms after {d.iterations} Frank-Wolfe steps")

    d2 = decompose_geo2(Q, KG_LITTLE, depth=40)
    print(f"Q = c+ R+ - c- R-: c+ = {d2.c_plus:.4f}, c- = {d2.c_minus:.4f}, residual {d2.residual:.1e}")

    X = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    X /= norm(X, "S").upper
    r = v_membership(X)
    print(f"unit Schur-norm 2 x 3 matrix: gauge {r['rho']:.4f} (source {r['source']})")
    print(f"  reconstruction error {r['reconstruction_error']:.1e}")


if __name__ == "__main__":
    main()
