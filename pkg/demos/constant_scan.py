"""Sample the ratios between completely bounded and plain norms."""

import numpy as np

from grothendieck import ratio_scan
from grothendieck.experiments import HIST_EDGES


def bar(rep, width=40):
    counts = rep.histogram
    top = max(int(counts.max()), 1)
    for k in np.flatnonzero(counts):
        print(f"  {HIST_EDGES[k]:.4f}  {'#' * max(1, int(width * counts[k] / top))} {counts[k]}")


def main():
    for kind, shape, ens in (("positive", 6, "gram"), ("little", (4, 4), "ginibre"), ("general", (3, 3), "ginibre")):
        rep = ratio_scan(kind, shape, 100, seed=1, ensemble=ens)
        print(f"{kind}: max ratio {rep.max_ratio:.4f}, bound {rep.bound:.4f}, within {rep.within_bound}")
        bar(rep)


if __name__ == "__main__":
    main()
