"""Magnitude-theoretic invariants of finite metric spaces."""

from .corpus import CompareConfig, ComparisonReport, compare, compare_all, corpus_space
from .errors import HypothesisViolation, MagcharError, ParseError, TheoremViolation, ValidationError
from .genpoly import GenPoly, LambdaPoly
from .invariants import (
    TauVector,
    adjacency_charpoly,
    charpoly,
    formal_magnitude,
    magnitude,
    similarity_matrix,
    stochastic_charpoly,
    tau,
    tau_oracle,
)
from .metric import FiniteMetricSpace, LengthMultiset, graph_to_metric, is_generic, is_isometric, is_weak3generic, make_space
from .reconstruct import four_point_identify, identify_four_point, reconstruct_weak3, s_opp_from_tau4
from .scalar import ExactScalar, SymbolBasis, declare_symbol, parse_scalar, sqrt

__version__ = "0.1.0"
