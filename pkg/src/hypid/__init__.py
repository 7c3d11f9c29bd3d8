"""Numerics for generalized hypergeometric functions with integral parameter differences.

Modules
-------
arith
    Pochhammer symbols, Stirling numbers, complex gamma.
hyp
    Series evaluation with error control, including unit argument.
charpoly
    Characteristic polynomials, their roots and limit studies.
transforms
    Finite-argument transformations and their degenerate limits.
summation
    Unit-argument summation and transformation formulas.
harness, cli
    Random batch checking and the ``hypid`` command.
"""

from .arith import IpdSpec, gamma_cx, pochhammer
from .errors import (BottomPole, ConstraintViolation, DegenerateNormalizer, HypidError,
                     IdenticallyZero, IllConditioned, InconsistencyError, MatchingFailure,
                     NonConvergent, PoleError)
from .hyp import EvalReport, HypSpec, eval_series, eval_unit

__version__ = "0.1.0"

__all__ = [
    "IpdSpec", "HypSpec", "EvalReport", "eval_series", "eval_unit", "gamma_cx", "pochhammer",
    "HypidError", "PoleError", "NonConvergent", "BottomPole", "DegenerateNormalizer",
    "IdenticallyZero", "IllConditioned", "InconsistencyError", "MatchingFailure",
    "ConstraintViolation",
]
