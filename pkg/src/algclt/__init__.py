"""Exact moment computations for algebraic central limit theorems.

Covers tensor, free, boolean and monotone independence, q-deformed limits,
Fock-space vacuum moments, a truncated q^2-CCR model and an
operator-valued boolean limit.
"""

from .clt import CltProblem, convergence_table, finite_n_moment, limit_moment, q_limit_moment
from .moments import Kind, Letter, MissingMomentError, SiteDistribution, evaluate_moment, normalize_word

__version__ = "0.1.0"

__all__ = [
    "CltProblem",
    "Kind",
    "Letter",
    "MissingMomentError",
    "SiteDistribution",
    "convergence_table",
    "evaluate_moment",
    "finite_n_moment",
    "limit_moment",
    "normalize_word",
    "q_limit_moment",
]
