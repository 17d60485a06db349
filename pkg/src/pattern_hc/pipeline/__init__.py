"""Hitting-time construction of pattern Hamilton cycles."""
from .bins import BinAssignment, assign_bins, bin_sizes, effective_pattern
from .classify import VertexClass, VertexClassification, classify_vertices
from .exposure import ExposureGuard
from .handsome import HandsomeReport, check_handsome
from .run import PipelineConfig, PipelineRun, construct_pi_hc, run_pipeline
from .steps import (ContractedDigraph, DStar, PathCollection, ShortPath, build_path_collection,
                    contract, expose_until_A, final_cycle)

__all__ = [
    "BinAssignment", "assign_bins", "bin_sizes", "effective_pattern",
    "VertexClass", "VertexClassification", "classify_vertices",
    "ExposureGuard", "HandsomeReport", "check_handsome",
    "PipelineConfig", "PipelineRun", "construct_pi_hc", "run_pipeline",
    "ContractedDigraph", "DStar", "PathCollection", "ShortPath", "build_path_collection",
    "contract", "expose_until_A", "final_cycle",
]
