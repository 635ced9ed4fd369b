"""Verification engine for the '2221' subfactor planar algebra.

The package reconstructs the two-generator presentation of the planar
algebra inside the graph planar algebra of its principal graph and checks
every explicit constant along the way: trace tables, inner product tables,
quadratic skein relations, braiding substitutes, the jellyfish evaluation
of closed diagrams against a state-sum oracle, fusion rules, and the
uniqueness exclusion computations.
"""

from .numerics import set_precision, get_precision, TolerancePolicy, approx_equal

__all__ = [
    "set_precision",
    "get_precision",
    "TolerancePolicy",
    "approx_equal",
]

__version__ = "0.1.0"
