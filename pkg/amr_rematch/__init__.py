"""
AMR Rematch Package

Motif-based AMR similarity (rematch), smatch and label-set baselines, the
RARE structural benchmark, and the evaluation harness around them.
"""

from amr_rematch.amr_core import (
    AmrGraph, Constant, CorpusEntry, graph_equal, graph_size, load_corpus, parse_entry, parse_penman,
    serialize_penman, validate_graph, write_corpus
)
from amr_rematch.evaluation import bench, eval_ablation, eval_semantic, eval_structural, fit_scaling, spearman
from amr_rematch.metrics import MetricOptions, SimilarityScore, label_jaccard, rematch, score_pair, smatch
from amr_rematch.motifs import FrameMap, load_frame_map, motif_set
from amr_rematch.rare import RewiredPair, SpectrumConfig, build_dataset, read_dataset, rewire_spectrum
from amr_rematch.main import main

__version__ = "1.0.0"
__all__ = [
    "AmrGraph",
    "Constant",
    "CorpusEntry",
    "parse_penman",
    "parse_entry",
    "load_corpus",
    "serialize_penman",
    "write_corpus",
    "validate_graph",
    "graph_equal",
    "graph_size",
    "FrameMap",
    "load_frame_map",
    "motif_set",
    "MetricOptions",
    "SimilarityScore",
    "rematch",
    "label_jaccard",
    "smatch",
    "score_pair",
    "RewiredPair",
    "SpectrumConfig",
    "rewire_spectrum",
    "build_dataset",
    "read_dataset",
    "spearman",
    "eval_structural",
    "eval_semantic",
    "eval_ablation",
    "bench",
    "fit_scaling",
    "main"
]
