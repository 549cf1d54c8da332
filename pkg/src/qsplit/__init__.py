"""Exact splittings of formal connections with a double pole, and their p-adic checks."""

__version__ = "0.1.0"

from .scalars import PrimeContext, factorial_valuation, reduce_mod, valuation
from .series import TruncatedSeries, check_log_decay, newton_polygon, slope_floor
from .connection import (ConnectionGerm, SeriesMatrix, covariant_derivative,
                         gauge_transform)
from .splitting import (block_split, extend_endomorphism,
                        generalized_eigenprojectors, mod_p_reduction_degree, verify_divisibility)

__all__ = [
    "PrimeContext", "factorial_valuation", "reduce_mod", "valuation",
    "TruncatedSeries", "check_log_decay", "newton_polygon", "slope_floor",
    "ConnectionGerm", "SeriesMatrix", "covariant_derivative", "gauge_transform",
    "block_split", "extend_endomorphism", "generalized_eigenprojectors",
    "mod_p_reduction_degree", "verify_divisibility",
]
