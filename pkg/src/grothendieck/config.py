"""Tolerances, iteration budgets and the package exception hierarchy."""

from dataclasses import dataclass, replace
import math

__all__ = [
    "KG_LITTLE",
    "KG_GENERAL_BOUND",
    "Tolerances",
    "Budget",
    "DEFAULT_TOL",
    "DEFAULT_BUDGET",
    "GrothendieckError",
    "DimensionError",
    "NotHermitianError",
    "NotPSDError",
    "DomainError",
    "NonConvergenceError",
]

#: complex little Grothendieck constant 4/pi
KG_LITTLE = 4.0 / math.pi
#: constructive bound k/(2 - k) on the complex Grothendieck constant
KG_GENERAL_BOUND = KG_LITTLE / (2.0 - KG_LITTLE)


@dataclass(frozen=True)
class Tolerances:
    """All numerical thresholds used across the package."""

    hermitian_pre: float = 1e-12
    hermitian_error: float = 1e-8
    eig_clamp: float = 1e-9
    psd_error: float = 1e-6
    jacobi_offdiag: float = 1e-13
    sdp_rel_gap: float = 1e-8
    sdp_feas: float = 1e-9
    sdp_max_iter: int = 500
    torus_gain: float = 1e-12
    torus_max_iter: int = 10000
    gram_truncation: float = 1e-10
    feas_tol: float = 1e-3
    support: float = 1e-12


@dataclass(frozen=True)
class Budget:
    """Search effort for the NP-hard torus problems and the iterative decompositions.

    ``grid_limit`` is the number of free phases the exhaustive grid may range
    over; ``grid_points`` is the resolution per phase. ``max_grid_evals``
    caps the grid size independently of both.
    """

    n_starts: int = 32
    n_rounding: int = 32
    grid_limit: int = 4
    grid_points: int = 72
    max_grid_evals: int = 27_000_000
    seed: int = 0
    fw_iters: int = 5000
    cg_max_rounds: int = 200
    cg_rel_gap: float = 1e-3

    def with_(self, **changes) -> "Budget":
        return replace(self, **changes)

    def validate(self) -> None:
        if self.n_starts < 1 or self.grid_points < 2 or self.grid_limit < 0:
            raise ValueError(f"invalid budget: {self}")
        if self.fw_iters < 1 or self.cg_max_rounds < 1:
            raise ValueError(f"invalid budget: {self}")


DEFAULT_TOL = Tolerances()
DEFAULT_BUDGET = Budget()


class GrothendieckError(Exception):
    """Base class for domain errors raised by this package."""

    code = "error"


class DimensionError(GrothendieckError, ValueError):
    code = "dimension"


class NotHermitianError(GrothendieckError, ValueError):
    code = "not_hermitian"


class NotPSDError(GrothendieckError, ValueError):
    code = "not_psd"


class DomainError(GrothendieckError, ValueError):
    code = "domain"


class NonConvergenceError(GrothendieckError, RuntimeError):
    """Raised by the interior point solver; ``last`` holds the final iterate."""

    code = "non_convergence"

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last
