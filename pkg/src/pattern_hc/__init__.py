"""Pattern Hamilton cycles in random digraphs: models, solvers, constructions, experiments."""
from .digraph import BOTH, IN, OUT, DegreeVariant, LabeledDigraph, event_A, low_degree_stats
from .hc_solver import CycleWitness, enumerate_oracle, exact_directed_hc, exact_pi_hc, verify_pi_hc
from .pattern import (Arrow, Pattern, PatternClass, are_equivalent, canonical_form, classify, follows,
                      is_primitive, parse_pattern)
from .random_model import (ProcessTrace, hitting_index, p_plus_minus, prefix_digraph, sample_dnm, sample_dnp,
                           sample_trace, threshold_p)

__version__ = "0.1.0"

__all__ = [
    "Arrow", "Pattern", "PatternClass", "parse_pattern", "canonical_form", "is_primitive", "are_equivalent",
    "follows", "classify", "LabeledDigraph", "DegreeVariant", "IN", "OUT", "BOTH", "event_A", "low_degree_stats",
    "ProcessTrace", "sample_dnp", "sample_dnm", "sample_trace", "prefix_digraph", "hitting_index",
    "threshold_p", "p_plus_minus", "CycleWitness", "verify_pi_hc", "exact_pi_hc", "enumerate_oracle",
    "exact_directed_hc",
]
