"""Constructive tanh network approximation: explicit builders realizing
polynomial, product, and partition-of-unity constructions, with certified
tolerances and empirical Sobolev-error verification."""

from .assembler import BuildPlan, assemble, assemble_shallow_analytic, plan, \
    taylor_polynomial
from .errors import BoundViolation, CapacityError, ContractViolation, \
    InternalConsistencyError, NumericalConditioningError, ParseError, TanhforgeError
from .function_catalog import CATALOG_LABELS, TargetFunction, make
from .jets import evaluate_jet
from .monomial_builder import build_all_monomials, build_monomials_with_constant, \
    build_multivariate_monomials, build_odd_monomials
from .netgraph import Layer, TanhNetwork, cancellation_floor, compose, deserialize, \
    parallelize, serialize
from .partition_builder import PartitionSpec, build_bump, certify_close, certify_far, \
    make_spec
from .product_builder import build_pairwise_product, build_product_deep, \
    build_product_shallow
from .tanh_calculus import tanh_derivative, tanh_derivative_at_zero
from .verifier import ErrorReport, default_grid, lemma_suite, rate_fit, \
    select_precision, sobolev_error

__all__ = [
    "BuildPlan", "assemble", "assemble_shallow_analytic", "plan", "taylor_polynomial",
    "BoundViolation", "CapacityError", "ContractViolation", "InternalConsistencyError",
    "NumericalConditioningError", "ParseError", "TanhforgeError",
    "CATALOG_LABELS", "TargetFunction", "make",
    "evaluate_jet",
    "build_all_monomials", "build_monomials_with_constant",
    "build_multivariate_monomials", "build_odd_monomials",
    "Layer", "TanhNetwork", "cancellation_floor", "compose", "deserialize",
    "parallelize", "serialize",
    "PartitionSpec", "build_bump", "certify_close", "certify_far", "make_spec",
    "build_pairwise_product", "build_product_deep", "build_product_shallow",
    "tanh_derivative", "tanh_derivative_at_zero",
    "ErrorReport", "default_grid", "lemma_suite", "rate_fit", "select_precision",
    "sobolev_error",
]

__version__ = "0.1.0"
