"""Certified brackets and factorizations for the Grothendieck family of matrix norms.

The ten norms of a complex matrix (operator, Hilbert-Schmidt, F, cbF, B,
cbB, S, T and two projective tensor norms), the semidefinite programs and
torus searches that compute or bracket them, the optimal factorizations read
off from the SDP solutions, Haagerup's phase-vector construction, and
decompositions of elliptope points into unimodular rank-one atoms.
"""

__version__ = "0.1.0"

from .config import (  # noqa: E402
    DEFAULT_BUDGET,
    DEFAULT_TOL,
    KG_GENERAL_BOUND,
    KG_LITTLE,
    Budget,
    DimensionError,
    DomainError,
    GrothendieckError,
    NonConvergenceError,
    NotHermitianError,
    NotPSDError,
    Tolerances,
)
from .torus import NormBracket, TorusVector, max_bilinear_torus, max_quadratic_torus  # noqa: E402
from .norms import AtomMixtureV, NormKind, norm, rank_one_closed_forms  # noqa: E402
from .factorizations import (  # noqa: E402
    CbBFactorization,
    FactSplit,
    SchurFactorization,
    cbb_factorization,
    cbf_vector,
    duality_witness,
    fact_split,
    schur_factorization,
)
from .haagerup import HaagerupData, haagerup_construction  # noqa: E402
from .geometry import (  # noqa: E402
    RAtomMixture,
    alpha_feasibility,
    decompose_geo,
    decompose_geo2,
    v_membership,
)
from .experiments import block_embedding, inequality_suite, ratio_scan  # noqa: E402

__all__ = [
    "__version__",
    "DEFAULT_BUDGET",
    "DEFAULT_TOL",
    "KG_GENERAL_BOUND",
    "KG_LITTLE",
    "Budget",
    "Tolerances",
    "GrothendieckError",
    "DimensionError",
    "DomainError",
    "NonConvergenceError",
    "NotHermitianError",
    "NotPSDError",
    "NormBracket",
    "TorusVector",
    "max_bilinear_torus",
    "max_quadratic_torus",
    "AtomMixtureV",
    "NormKind",
    "norm",
    "rank_one_closed_forms",
    "CbBFactorization",
    "FactSplit",
    "SchurFactorization",
    "cbb_factorization",
    "cbf_vector",
    "duality_witness",
    "fact_split",
    "schur_factorization",
    "HaagerupData",
    "haagerup_construction",
    "RAtomMixture",
    "alpha_feasibility",
    "decompose_geo",
    "decompose_geo2",
    "v_membership",
    "block_embedding",
    "inequality_suite",
    "ratio_scan",
]
