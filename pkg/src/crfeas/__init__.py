"""Product-space and constraint-reduced projection algorithms for feasibility problems."""

from .hilbert import DivergenceError, FixedPointOperator, IterationTrace, StoppingCriterion, estimate_linear_rate, \
    inner, iterate, norm
from .reformulation import FeasibilityProblem, ProductReformulation, apply_PW, check_equivalence, make_cr_dr, \
    make_cr_map, make_product_dr, make_product_map

__version__ = "0.1.0"

__all__ = [
    "DivergenceError",
    "FeasibilityProblem",
    "FixedPointOperator",
    "IterationTrace",
    "ProductReformulation",
    "StoppingCriterion",
    "apply_PW",
    "check_equivalence",
    "estimate_linear_rate",
    "inner",
    "iterate",
    "make_cr_dr",
    "make_cr_map",
    "make_product_dr",
    "make_product_map",
    "norm",
]
