"""
Smatch Module

Triple-matching alignment between two AMR graphs. A one-to-one node mapping
is searched by hill climbing with restarts; alignment spaces small enough are
enumerated exactly instead.
"""

import itertools
import logging
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from amr_rematch.amr_core import AmrGraph
from amr_rematch.config import DEFAULT_SEED, DEFAULT_SMATCH_RESTARTS, SMATCH_EXACT_LIMIT

logger = logging.getLogger(__name__)

UNMAPPED = -1
NodePair = Tuple[int, int]


@dataclass(frozen=True)
class AlignmentState:
    """Partial injection from nodes of the first graph to nodes of the second."""

    mapping: Dict[str, str]
    matched: int
    total1: int
    total2: int

    @property
    def precision(self) -> Fraction:
        return Fraction(self.matched, self.total1)

    @property
    def recall(self) -> Fraction:
        return Fraction(self.matched, self.total2)

    @property
    def score(self) -> Fraction:
        """Matched-triple F1."""
        return Fraction(2 * self.matched, self.total1 + self.total2)


def triple_count(g: AmrGraph) -> int:
    """Instance, attribute, relation and top triples of a graph."""
    return len(g.instances) + len(g.attributes) + len(g.relations) + 1


class AlignmentProblem:
    """
    Candidate pool and match weights for aligning g1 onto g2.

    `unary[(i, j)]` counts instance, attribute and top triples matched by
    mapping node i to node j alone; `binary[(i, j)][(k, l)]` counts relation
    triples matched when both i -> j and k -> l hold. Nodes are indexed in
    sorted node-id order.
    """

    def __init__(self, g1: AmrGraph, g2: AmrGraph):
        self.g1 = g1
        self.g2 = g2
        self.nodes1 = sorted(g1.instances)
        self.nodes2 = sorted(g2.instances)
        index1 = {node: i for i, node in enumerate(self.nodes1)}
        index2 = {node: j for j, node in enumerate(self.nodes2)}

        self.unary: Counter = Counter()
        self.binary: Dict[NodePair, Counter] = defaultdict(Counter)

        by_concept = defaultdict(list)
        for j, node in enumerate(self.nodes2):
            by_concept[g2.instances[node]].append(j)
        self.by_concept = by_concept
        for i, node in enumerate(self.nodes1):
            for j in by_concept.get(g1.instances[node], []):
                self.unary[(i, j)] += 1

        by_attribute = defaultdict(list)
        for source, label, constant in self._attribute_triples(g2):
            by_attribute[(label, constant)].append(index2[source])
        for source, label, constant in self._attribute_triples(g1):
            for j in by_attribute.get((label, constant), []):
                self.unary[(index1[source], j)] += 1

        by_role = defaultdict(list)
        for source, role, target in g2.relations:
            by_role[role].append((index2[source], index2[target]))
        for source, role, target in g1.relations:
            i, k = index1[source], index1[target]
            for j, l in by_role.get(role, []):
                self.binary[(i, j)][(k, l)] += 1
                self.binary[(k, l)][(i, j)] += 1

        pool = defaultdict(set)
        for i, j in self.unary:
            pool[i].add(j)
        for i, j in self.binary:
            pool[i].add(j)
        self.candidates: List[List[int]] = [sorted(pool[i]) for i in range(len(self.nodes1))]

    @staticmethod
    def _attribute_triples(g: AmrGraph):
        # The root is encoded as a top attribute so root choice affects the score
        return list(g.attributes) + [(g.root, "top", g.instances[g.root])]

    def matched(self, mapping: List[int]) -> int:
        """Number of triples matched under a full mapping vector."""
        total = 0
        for i, j in enumerate(mapping):
            if j == UNMAPPED:
                continue
            total += self.unary.get((i, j), 0)
            for (k, l), weight in self.binary.get((i, j), {}).items():
                if k > i and mapping[k] == l:
                    total += weight
        return total

    def _contribution(self, i: int, j: int, mapping: List[int], exclude: Tuple[int, ...]) -> int:
        if j == UNMAPPED:
            return 0
        total = self.unary.get((i, j), 0)
        for (k, l), weight in self.binary.get((i, j), {}).items():
            if k not in exclude and mapping[k] == l:
                total += weight
        return total

    def move_gain(self, mapping: List[int], i: int, j: int) -> int:
        exclude = (i,)
        return self._contribution(i, j, mapping, exclude) - self._contribution(i, mapping[i], mapping, exclude)

    def swap_gain(self, mapping: List[int], i: int, k: int) -> int:
        ji, jk = mapping[i], mapping[k]
        exclude = (i, k)
        before = (self._contribution(i, ji, mapping, exclude) + self._contribution(k, jk, mapping, exclude)
                  + self._pair_weight(i, ji, k, jk))
        after = (self._contribution(i, jk, mapping, exclude) + self._contribution(k, ji, mapping, exclude)
                 + self._pair_weight(i, jk, k, ji))
        return after - before

    def _pair_weight(self, i: int, j: int, k: int, l: int) -> int:
        if j == UNMAPPED or l == UNMAPPED:
            return 0
        return self.binary.get((i, j), {}).get((k, l), 0)

    def smart_init(self) -> List[int]:
        """Greedy concept matching, preferring the same variable name on ties."""
        used = set()
        mapping = []
        for i, node in enumerate(self.nodes1):
            options = self.by_concept.get(self.g1.instances[node], [])
            preferred = [j for j in options if self.nodes2[j] == node] + options
            choice = next((j for j in preferred if j not in used), UNMAPPED)
            if choice != UNMAPPED:
                used.add(choice)
            mapping.append(choice)
        return mapping

    def random_init(self, rng: random.Random) -> List[int]:
        """Uniformly random injection of min(|V1|, |V2|) nodes."""
        n1, n2 = len(self.nodes1), len(self.nodes2)
        sources = rng.sample(range(n1), n1)
        targets = rng.sample(range(n2), n2)
        mapping = [UNMAPPED] * n1
        for i, j in zip(sources, targets):
            mapping[i] = j
        return mapping

    def climb(self, mapping: List[int]) -> Tuple[List[int], int]:
        """
        Steepest-ascent hill climbing over move and swap operations.

        Ties between equal gains keep the first move found, scanning nodes
        in ascending index order.
        """
        mapping = list(mapping)
        owner = {j: i for i, j in enumerate(mapping) if j != UNMAPPED}
        current = self.matched(mapping)
        while True:
            best_gain, best_op = 0, None
            for i, candidates in enumerate(self.candidates):
                for j in candidates:
                    if j == mapping[i]:
                        continue
                    k = owner.get(j)
                    if k is None:
                        gain = self.move_gain(mapping, i, j)
                        op = ('move', i, j)
                    else:
                        gain = self.swap_gain(mapping, i, k)
                        op = ('swap', i, k)
                    if gain > best_gain:
                        best_gain, best_op = gain, op
            if best_op is None:
                break
            kind, i, other = best_op
            if kind == 'move':
                if mapping[i] != UNMAPPED:
                    del owner[mapping[i]]
                mapping[i] = other
                owner[other] = i
            else:
                mapping[i], mapping[other] = mapping[other], mapping[i]
                for node in (i, other):
                    if mapping[node] != UNMAPPED:
                        owner[mapping[node]] = node
            current += best_gain
        return mapping, current

    def alignment_count(self) -> int:
        """Number of maximal injective alignments (the exhaustive search size)."""
        n1, n2 = len(self.nodes1), len(self.nodes2)
        return math.perm(max(n1, n2), min(n1, n2))

    def exhaustive(self) -> Tuple[List[int], int]:
        """Best mapping by enumerating every maximal injection."""
        n1, n2 = len(self.nodes1), len(self.nodes2)
        best_mapping, best = [UNMAPPED] * n1, -1
        if n1 <= n2:
            for perm in itertools.permutations(range(n2), n1):
                mapping = list(perm)
                score = self.matched(mapping)
                if score > best:
                    best_mapping, best = mapping, score
        else:
            for perm in itertools.permutations(range(n1), n2):
                mapping = [UNMAPPED] * n1
                for j, i in enumerate(perm):
                    mapping[i] = j
                score = self.matched(mapping)
                if score > best:
                    best_mapping, best = mapping, score
        return best_mapping, best

    def to_state(self, mapping: List[int], matched: int) -> AlignmentState:
        return AlignmentState(
            mapping={self.nodes1[i]: self.nodes2[j] for i, j in enumerate(mapping) if j != UNMAPPED},
            matched=matched,
            total1=triple_count(self.g1),
            total2=triple_count(self.g2),
        )


def align(g1: AmrGraph, g2: AmrGraph, restarts: int = DEFAULT_SMATCH_RESTARTS,
          seed: int = DEFAULT_SEED, exact_limit: int = SMATCH_EXACT_LIMIT) -> AlignmentState:
    """
    Find a high-scoring alignment of g1 onto g2.

    Args:
        g1: Source graph
        g2: Target graph
        restarts: Hill-climbing restarts; restart 0 is seeded by concept matches,
            the rest by random injections
        seed: Seed of the per-call random generator
        exact_limit: Enumerate exhaustively when the number of maximal
            injections is at most this (0 disables)

    Returns:
        AlignmentState of the best alignment found
    """
    if restarts < 1:
        raise ValueError("restarts must be a positive integer")
    problem = AlignmentProblem(g1, g2)
    if problem.alignment_count() <= exact_limit:
        mapping, matched = problem.exhaustive()
        return problem.to_state(mapping, matched)

    rng = random.Random(seed)
    best_mapping, best = None, -1
    for restart in range(restarts):
        start = problem.smart_init() if restart == 0 else problem.random_init(rng)
        mapping, matched = problem.climb(start)
        logger.debug(f"smatch restart {restart}: {matched} matched triples")
        if matched > best:
            best_mapping, best = mapping, matched
    return problem.to_state(best_mapping, best)


def smatch_alignment(g1: AmrGraph, g2: AmrGraph, restarts: int = DEFAULT_SMATCH_RESTARTS,
                     seed: int = DEFAULT_SEED, exact_limit: int = SMATCH_EXACT_LIMIT
                     ) -> Tuple[AlignmentState, str]:
    """
    Symmetrized smatch: align in both directions and keep the better one.

    Returns:
        (AlignmentState, direction) with direction "forward" or "backward"
    """
    forward = align(g1, g2, restarts, seed, exact_limit)
    backward = align(g2, g1, restarts, seed + 1, exact_limit)
    if backward.matched > forward.matched:
        return backward, "backward"
    return forward, "forward"
