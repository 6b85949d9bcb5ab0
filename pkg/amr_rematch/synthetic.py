"""
Synthetic AMR Module

Random AMR-shaped graphs for benchmarking and testing: rooted DAGs over a
small concept vocabulary, PropBank-style frames with core arguments, a few
re-entrancies and up to two attributes per instance.
"""

import logging
import math
import random
from typing import List, Optional, Tuple

from amr_rematch.amr_core import NUMBER, STRING, SYMBOL, AmrGraph, Constant, CorpusEntry, parse_penman
from amr_rematch.config import DEFAULT_SEED, SYNTH_CORPUS_SIZE, SYNTH_MAX_SIZE, SYNTH_MIN_SIZE

logger = logging.getLogger(__name__)

FRAMES = [
    "want-01", "say-01", "go-02", "see-01", "give-01", "make-01", "know-01", "think-01",
    "believe-01", "need-01", "help-01", "use-01", "find-01", "tell-01", "work-01", "try-01",
    "leave-11", "call-01", "feel-01", "become-01", "show-01", "hear-01", "play-01", "run-02",
    "move-01", "live-01", "hold-01", "bring-01", "write-01", "provide-01", "sit-01", "stand-01",
    "lose-02", "pay-01", "meet-03", "include-01", "continue-01", "learn-01", "change-01", "lead-02",
]
ENTITIES = [
    "person", "boy", "girl", "man", "woman", "child", "dog", "cat", "house", "car",
    "city", "country", "company", "government", "book", "money", "thing", "time", "way", "day",
    "world", "school", "family", "group", "problem", "hand", "part", "place", "case", "week",
    "system", "program", "question", "number", "night", "point", "home", "water", "room", "mother",
]
CORE_ROLES = ["ARG0", "ARG1", "ARG2", "ARG3", "ARG4"]
NON_CORE_ROLES = ["mod", "time", "location", "manner", "purpose", "poss", "part", "topic"]
NAMES = ["Helen", "Maya", "Paris", "Oslo", "Ada", "Lin", "Omar", "Ravi"]

FRAME_PROBABILITY = 0.4
REENTRANCY_PROBABILITY = 0.05


def _random_attribute(rng: random.Random, used: set) -> Optional[Tuple[str, Constant]]:
    options = [
        ("polarity", lambda: Constant(SYMBOL, "-")),
        ("quant", lambda: Constant(NUMBER, str(rng.randint(1, 100)))),
        ("mode", lambda: Constant(SYMBOL, rng.choice(["imperative", "interrogative", "expressive"]))),
        ("op1", lambda: Constant(STRING, rng.choice(NAMES))),
        ("value", lambda: Constant(STRING, rng.choice(NAMES))),
    ]
    options = [(label, make) for label, make in options if label not in used]
    if not options:
        return None
    label, make = rng.choice(options)
    return label, make()


def random_graph(rng: random.Random, size: int) -> AmrGraph:
    """
    Grow a random valid AMR graph of about `size` triples.

    Nodes are added under earlier nodes, and extra re-entrant edges only point
    from earlier to later nodes, so creation order is a topological order and
    the graph stays acyclic and connected. The size can overshoot by one when
    only a node (two triples) fits.

    Args:
        rng: Random generator
        size: Target number of instances, relations and attributes

    Returns:
        AmrGraph with node ids n0, n1, ...
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    instances = {"n0": rng.choice(FRAMES)}
    relations: List[Tuple[str, str, str]] = []
    attributes: List[Tuple[str, str, Constant]] = []
    used_roles = {"n0": set()}
    used_labels = {"n0": set()}
    pairs = set()
    count = 1

    def free_role(node: str) -> Optional[str]:
        pool = CORE_ROLES + NON_CORE_ROLES if instances[node] in FRAMES else NON_CORE_ROLES
        for role in pool:
            if role not in used_roles[node]:
                return role
        return None

    while count < size:
        nodes = list(instances)
        roll = rng.random()
        if count + 1 == size or roll < 0.25:
            candidates = [n for n in nodes if len(used_labels[n]) < 2]
            if candidates:
                node = rng.choice(candidates)
                attribute = _random_attribute(rng, used_labels[node])
                if attribute is not None:
                    label, constant = attribute
                    attributes.append((node, label, constant))
                    used_labels[node].add(label)
                    count += 1
                    continue
        if len(nodes) > 2 and roll > 1 - REENTRANCY_PROBABILITY:
            i, j = sorted(rng.sample(range(len(nodes)), 2))
            source, target = nodes[i], nodes[j]
            role = free_role(source)
            if role is not None and (source, target) not in pairs:
                relations.append((source, role, target))
                used_roles[source].add(role)
                pairs.add((source, target))
                count += 1
                continue

        # Recent nodes are favoured as parents, which keeps depth moderate
        parent = nodes[min(len(nodes) - 1, int(len(nodes) * math.sqrt(rng.random())))]
        role = free_role(parent)
        if role is None:
            parent = next((n for n in nodes if free_role(n) is not None), None)
            if parent is None:
                break
            role = free_role(parent)
        child = f"n{len(nodes)}"
        instances[child] = rng.choice(FRAMES) if rng.random() < FRAME_PROBABILITY else rng.choice(ENTITIES)
        used_roles[child] = set()
        used_labels[child] = set()
        relations.append((parent, role, child))
        used_roles[parent].add(role)
        pairs.add((parent, child))
        count += 2

    return AmrGraph(root="n0", instances=instances, relations=tuple(relations), attributes=tuple(attributes))


def synthetic_corpus(count: int = SYNTH_CORPUS_SIZE, seed: int = DEFAULT_SEED,
                     min_size: int = SYNTH_MIN_SIZE, max_size: int = SYNTH_MAX_SIZE) -> List[CorpusEntry]:
    """
    Random corpus with graph sizes drawn log-uniformly in [min_size, max_size].

    Args:
        count: Number of graphs
        seed: Generator seed
        min_size: Smallest target size
        max_size: Largest target size

    Returns:
        Corpus entries with ids synth-0, synth-1, ...
    """
    if not 1 <= min_size <= max_size:
        raise ValueError(f"invalid size range [{min_size}, {max_size}]")
    rng = random.Random(seed)
    entries = []
    for index in range(count):
        size = round(math.exp(rng.uniform(math.log(min_size), math.log(max_size))))
        entries.append(CorpusEntry(id=f"synth-{index}", graph=random_graph(rng, size)))
    logger.info(f"Generated {count} synthetic graphs (seed {seed})")
    return entries


# Hand-built fixtures

SHOULD_DO = """
(r / recommend-01
   :ARG1 (d / do-02
            :ARG0 (y / you)
            :ARG1 (i / it)
            :time (e / ever))
   :ARG2 y)
"""

SHOULD_NEVER_DO = """
(r / recommend-01
   :ARG1 (d / do-02
            :ARG0 (y / you)
            :ARG1 (i / it)
            :polarity -
            :time (e / ever))
   :ARG2 y)
"""


def negation_pair() -> Tuple[AmrGraph, AmrGraph]:
    """
    "You should do it" against "You should never do it".

    Returns:
        (base, negated); the negated graph differs from the base only by a
        `:polarity -` attribute
    """
    return parse_penman(SHOULD_DO), parse_penman(SHOULD_NEVER_DO)


def monotone_overlap_pairs(count: int = 10) -> List[Tuple[AmrGraph, AmrGraph, float]]:
    """
    Star-shaped pairs whose second graph shares k of `count` leaves with the first.

    Returns:
        (first, second, gold) triples with gold = k / count and k = 1..count
    """
    leaves = ENTITIES[:count]
    replacements = ENTITIES[count:2 * count]
    first = AmrGraph(
        root="r",
        instances={"r": "say-01", **{f"c{i}": concept for i, concept in enumerate(leaves)}},
        relations=tuple(("r", f"op{i + 1}", f"c{i}") for i in range(count)),
    )
    pairs = []
    for shared in range(1, count + 1):
        concepts = leaves[:shared] + replacements[shared:count]
        second = AmrGraph(
            root="r",
            instances={"r": "say-01", **{f"c{i}": concept for i, concept in enumerate(concepts)}},
            relations=first.relations,
        )
        pairs.append((first, second, shared / count))
    return pairs
