"""Exact mutation combinatorics for skew-symmetrizable exchange matrices."""

from .catalog import CASE_IDS, FAMILY_NAMES, make_family, reference_case
from .diagram import Diagram, canonical_form, diagram_of_matrix, mutate_diagram
from .exchange_core import (
    EnhancedWord,
    ExchangeMatrix,
    MutationError,
    MutationWord,
    Seed,
    apply_word,
    mutate_matrix,
)
from .growth import GrowthConfig, classify_growth, exchange_graph_ball, growth_report
from .mutation_class import enumerate_class, is_mutation_finite
from .tropical import certificate_for_case, check_pingpong, g_step, verify_paper_action
from .unfolding import UnfoldingSpec, check_unfolding_static, load_pair, verify_unfolding

__version__ = "0.1.0"

__all__ = [
    "CASE_IDS", "FAMILY_NAMES", "make_family", "reference_case",
    "Diagram", "canonical_form", "diagram_of_matrix", "mutate_diagram",
    "EnhancedWord", "ExchangeMatrix", "MutationError", "MutationWord", "Seed",
    "apply_word", "mutate_matrix",
    "GrowthConfig", "classify_growth", "exchange_graph_ball", "growth_report",
    "enumerate_class", "is_mutation_finite",
    "certificate_for_case", "check_pingpong", "g_step", "verify_paper_action",
    "UnfoldingSpec", "check_unfolding_static", "load_pair", "verify_unfolding",
]
