"""Bracket all ten norms of one matrix and compare a rank-one input with its closed forms."""

import numpy as np

from grothendieck import norm, rank_one_closed_forms

KINDS = ("op", "hs", "F", "cbF", "B", "cbB", "S", "T", "proj_inf_inf", "proj_2_inf")


def show(X, title):
    print(title)
    for kind in KINDS:
        br = norm(X, kind)
        print(f"  {kind:>13}  [{br.lower:.8f}, {br.upper:.8f}]  {br.status}")


def main():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    show(X, "random complex 3 x 4")

    mu, nu = np.array([1.0, 2j, -1.0]), np.array([0.5, 1 - 1j])
    show(np.outer(mu, nu), "rank one mu nu^T")
    print("  closed forms:")
    for kind, value in rank_one_closed_forms(mu, nu).items():
        print(f"  {kind:>13}  {value:.8f}")

    # the completely bounded norms never exceed the plain ones by more than the constants
    F, cbF = norm(X, "F"), norm(X, "cbF")
    B, cbB = norm(X, "B"), norm(X, "cbB")
    print(f"cbF / F = {cbF.upper / F.lower:.4f}   (at most sqrt(4/pi) = {np.sqrt(4 / np.pi):.4f})")
    print(f"cbB / B = {cbB.upper / B.lower:.4f}")


if __name__ == "__main__":
    main()
