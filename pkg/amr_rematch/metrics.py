"""
Metrics Module

Pairwise AMR similarity: rematch (motif-set Jaccard), the label-set Jaccard
baseline and symmetrized smatch, plus the alignment and feature search-space
sizes used in the efficiency comparison.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import AbstractSet, Any, Callable, Dict, FrozenSet, Iterable, Optional, Tuple

from amr_rematch.amr_core import AmrGraph
from amr_rematch.config import (
    DEFAULT_CANDIDATES, DEFAULT_MOTIF_KINDS, DEFAULT_SEED, DEFAULT_SMATCH_RESTARTS, SMATCH_EXACT_LIMIT
)
from amr_rematch.motifs import FrameMap, label_set, motif_set
from amr_rematch.smatch import smatch_alignment

logger = logging.getLogger(__name__)

CANDIDATE_MODES = ("all", "label")


@dataclass(frozen=True)
class SimilarityScore:
    value: Fraction
    metric: str
    detail: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise ValueError(f"{self.metric} score {self.value} outside [0, 1]")

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class MetricOptions:
    """Every knob that alters a score, shared by all metrics."""

    frames: Optional[FrameMap] = None
    kinds: FrozenSet[str] = DEFAULT_MOTIF_KINDS
    restarts: int = DEFAULT_SMATCH_RESTARTS
    seed: int = DEFAULT_SEED
    candidates: str = DEFAULT_CANDIDATES
    exact_limit: int = SMATCH_EXACT_LIMIT


def jaccard(a: AbstractSet, b: AbstractSet) -> Tuple[Fraction, int, int]:
    """
    Jaccard similarity of two sets.

    Returns:
        (similarity, intersection size, union size); two empty sets score 1
    """
    union = len(a | b)
    if union == 0:
        return Fraction(1), 0, 0
    intersection = len(a & b)
    return Fraction(intersection, union), intersection, union


def rematch(g1: AmrGraph, g2: AmrGraph, frames: Optional[FrameMap] = None,
            enabled: Iterable[str] = DEFAULT_MOTIF_KINDS) -> SimilarityScore:
    """
    Jaccard similarity of the two graphs' motif sets.

    Args:
        g1: First graph
        g2: Second graph
        frames: Optional PropBank frame generalization
        enabled: Motif kinds to compare

    Returns:
        SimilarityScore with intersection/union sizes as detail
    """
    value, intersection, union = jaccard(motif_set(g1, frames, enabled), motif_set(g2, frames, enabled))
    return SimilarityScore(value, "rematch", {'intersection': intersection, 'union': union})


def label_jaccard(g1: AmrGraph, g2: AmrGraph) -> SimilarityScore:
    """Jaccard similarity of the two graphs' label sets (structure ignored)."""
    value, intersection, union = jaccard(label_set(g1), label_set(g2))
    return SimilarityScore(value, "labels", {'intersection': intersection, 'union': union})


def smatch(g1: AmrGraph, g2: AmrGraph, restarts: int = DEFAULT_SMATCH_RESTARTS,
           seed: int = DEFAULT_SEED, exact_limit: int = SMATCH_EXACT_LIMIT) -> SimilarityScore:
    """
    Matched-triple F1 under the best alignment found in either direction.

    Args:
        g1: First graph
        g2: Second graph
        restarts: Hill-climbing restarts per direction
        seed: Seed for the random restarts
        exact_limit: Alignment count below which the search is exhaustive

    Returns:
        SimilarityScore with matched/total triples, precision and recall as detail
    """
    state, direction = smatch_alignment(g1, g2, restarts, seed, exact_limit)
    if direction == "backward":
        precision, recall = state.recall, state.precision
    else:
        precision, recall = state.precision, state.recall
    detail = {
        'matched': state.matched,
        'triples1': state.total1 if direction == "forward" else state.total2,
        'triples2': state.total2 if direction == "forward" else state.total1,
        'precision': precision,
        'recall': recall,
        'direction': direction,
    }
    return SimilarityScore(state.score, "smatch", detail)


def alignment_search_space(g1: AmrGraph, g2: AmrGraph, candidates: str = DEFAULT_CANDIDATES) -> int:
    """
    Size of the node-alignment search space: the product over nodes of g1 of
    their matching candidates in g2.

    Args:
        g1: First graph
        g2: Second graph
        candidates: "all" (any node of g2) or "label" (same-concept nodes only)

    Returns:
        Exact integer
    """
    if candidates == "all":
        return len(g2.instances) ** len(g1.instances)
    if candidates == "label":
        counts = Counter(g2.instances.values())
        return math.prod(counts.get(concept, 0) for concept in g1.instances.values())
    raise ValueError(f"unknown candidate mode {candidates!r}, expected one of {CANDIDATE_MODES}")


def feature_search_space(g1: AmrGraph, g2: AmrGraph, frames: Optional[FrameMap] = None,
                         enabled: Iterable[str] = DEFAULT_MOTIF_KINDS) -> int:
    """Size of the feature comparison space: |F(g1)| * |F(g2)|."""
    return len(motif_set(g1, frames, enabled)) * len(motif_set(g2, frames, enabled))


# Registry

def _score_rematch(g1: AmrGraph, g2: AmrGraph, options: MetricOptions) -> SimilarityScore:
    return rematch(g1, g2, options.frames, options.kinds)


def _score_labels(g1: AmrGraph, g2: AmrGraph, options: MetricOptions) -> SimilarityScore:
    return label_jaccard(g1, g2)


def _score_smatch(g1: AmrGraph, g2: AmrGraph, options: MetricOptions) -> SimilarityScore:
    return smatch(g1, g2, options.restarts, options.seed, options.exact_limit)


METRICS: Dict[str, Callable[[AmrGraph, AmrGraph, MetricOptions], SimilarityScore]] = {
    "rematch": _score_rematch,
    "labels": _score_labels,
    "smatch": _score_smatch,
}


def get_metric(name: str) -> Callable[[AmrGraph, AmrGraph, MetricOptions], SimilarityScore]:
    if name not in METRICS:
        raise ValueError(f"unknown metric {name!r}, expected one of {sorted(METRICS)}")
    return METRICS[name]


def score_pair(name: str, g1: AmrGraph, g2: AmrGraph, options: Optional[MetricOptions] = None) -> SimilarityScore:
    return get_metric(name)(g1, g2, options or MetricOptions())


def search_space(name: str, g1: AmrGraph, g2: AmrGraph, options: Optional[MetricOptions] = None) -> int:
    """
    Search space explored by a metric on one pair: node alignments for
    smatch, feature pairs for the set-based metrics.
    """
    options = options or MetricOptions()
    get_metric(name)
    if name == "smatch":
        return alignment_search_space(g1, g2, options.candidates)
    if name == "labels":
        return len(label_set(g1)) * len(label_set(g2))
    return feature_search_space(g1, g2, options.frames, options.kinds)
