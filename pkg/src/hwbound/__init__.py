"""Explicit absolute constant and tail bounds for the Gaussian Hanson-Wright inequality."""

from .bounds import (
    BoundReport,
    Side,
    TailQuery,
    assemble_report,
    exact_chernoff_bound,
    intermediate_exponent,
    parametrized_bound,
    universal_bound,
)
from .constants import KappaResult, XiValue, figure_grid, solve_kappa, xi_closed, xi_series
from .montecarlo import TailEstimate, Verdict, estimate_tail, verify_bound
from .spectral import Spectrum, SymmetricMatrix, decompose, make_symmetric, read_matrix

__all__ = [
    "BoundReport", "KappaResult", "Side", "Spectrum", "SymmetricMatrix", "TailEstimate",
    "TailQuery", "Verdict", "XiValue", "assemble_report", "decompose", "estimate_tail",
    "exact_chernoff_bound", "figure_grid", "intermediate_exponent", "make_symmetric",
    "parametrized_bound", "read_matrix", "solve_kappa", "universal_bound", "verify_bound",
    "xi_closed", "xi_series",
]
