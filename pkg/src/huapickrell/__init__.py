"""Moments, densities and sampling of the generalized Cauchy (Hua-Pickrell) ensemble.

Submodules
----------
specfun
    Gamma ratios, terminating hypergeometric sums, continuous Hahn
    polynomials and Bessel functions.
pseudojacobi
    Pseudo-Jacobi polynomials, their norms and the ensemble parameters.
quadrature
    Adaptive Gauss-Legendre quadrature on intervals and the real line.
density
    One-point density, its identities and the large-N limit.
moments
    ``Q(k; s, N)`` by closed form, quadrature and recurrences.
sampler
    Metropolis-within-Gibbs sampling and Monte Carlo estimates.
verify
    Identity checks grouped into suites.
cli
    Command-line interface.
"""

__version__ = "0.1.0"

from .errors import (AcceptanceRateWarning, ConditioningWarning, DomainError,  # noqa: E402
                     ExistenceError, HuaPickrellError, PoleError, QuadratureError,
                     RecurrencePivotError, StripError)
from .kernels import BACKEND  # noqa: E402
from .pseudojacobi import EnsembleParams  # noqa: E402
from .density import rho, rho_limit  # noqa: E402
from .moments import (initial_conditions, j_value, j_zeros, large_n_limit,  # noqa: E402
                      q_byparts, q_hahn, q_quadrature, q_recurrence)
from .sampler import ChainConfig, estimate_q, run_chain  # noqa: E402

__all__ = [
    "AcceptanceRateWarning",
    "BACKEND",
    "ChainConfig",
    "ConditioningWarning",
    "DomainError",
    "EnsembleParams",
    "ExistenceError",
    "HuaPickrellError",
    "PoleError",
    "QuadratureError",
    "RecurrencePivotError",
    "StripError",
    "estimate_q",
    "initial_conditions",
    "j_value",
    "j_zeros",
    "large_n_limit",
    "q_byparts",
    "q_hahn",
    "q_quadrature",
    "q_recurrence",
    "rho",
    "rho_limit",
    "run_chain",
]
