"""
RARE Benchmark Module

Generates rewired AMR pairs by constraint-respecting edge swaps: attribute
swaps exchange source nodes, relation swaps exchange target nodes. Each pair
is annotated with gold similarity (|E| - |E'|) / |E|, where E' is the number
of original edges missing from the rewired graph.
"""

import json
import logging
import math
import os
import random
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from amr_rematch.amr_core import (
    AmrGraph, CorpusEntry, parse_penman, serialize_penman, validate_graph
)
from amr_rematch.config import (
    DEFAULT_LEVELS, DEFAULT_SEED, DEFAULT_SPLIT, MAX_ATTEMPTS_PER_EDGE, SPLIT_NAMES, STATS_FILE
)
from amr_rematch.exceptions import EmptyCorpus, GraphInvariantError, MalformedRecord, SpectrumInfeasible

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rejected:
    """A candidate swap that would break an AMR constraint."""

    constraint: str
    reason: str = ""


@dataclass(frozen=True)
class SpectrumConfig:
    levels: Tuple[float, ...] = DEFAULT_LEVELS
    max_attempts: Optional[int] = None  # None: MAX_ATTEMPTS_PER_EDGE * |E|
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        levels = tuple(float(level) for level in self.levels)
        if not levels:
            raise ValueError("at least one spectrum level is required")
        if any(not 0.0 <= level <= 1.0 for level in levels):
            raise ValueError(f"spectrum levels must lie in [0, 1]: {levels}")
        if list(levels) != sorted(levels):
            raise ValueError(f"spectrum levels must be sorted ascending: {levels}")
        if self.max_attempts is not None and self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")
        object.__setattr__(self, 'levels', levels)

    def attempts_for(self, g: AmrGraph) -> int:
        if self.max_attempts is not None:
            return self.max_attempts
        return MAX_ATTEMPTS_PER_EDGE * g.edge_count


@dataclass(frozen=True)
class RewiredPair:
    id: str
    original: AmrGraph
    rewired: AmrGraph
    total_edges: int
    swapped_edges: int
    source_id: str = ""
    level: Optional[float] = None
    infeasible: bool = False

    @property
    def gold(self) -> Fraction:
        return Fraction(self.total_edges - self.swapped_edges, self.total_edges)

    def to_record(self) -> Dict:
        return {
            "id": self.id,
            "gold": float(self.gold),
            "total_edges": self.total_edges,
            "swapped_edges": self.swapped_edges,
            "original": serialize_penman(self.original, indent=None),
            "rewired": serialize_penman(self.rewired, indent=None),
            "source": self.source_id,
            "level": self.level,
            "infeasible": self.infeasible,
        }

    @classmethod
    def from_record(cls, record: Dict) -> "RewiredPair":
        return cls(
            id=record["id"],
            original=parse_penman(record["original"]),
            rewired=parse_penman(record["rewired"]),
            total_edges=int(record["total_edges"]),
            swapped_edges=int(record["swapped_edges"]),
            source_id=record.get("source", ""),
            level=record.get("level"),
            infeasible=bool(record.get("infeasible", False)),
        )


def swapped_edge_count(original: AmrGraph, rewired: AmrGraph) -> int:
    """Number of edges of the original graph absent from the rewired one."""
    return (len(set(original.relations) - set(rewired.relations))
            + len(set(original.attributes) - set(rewired.attributes)))


def _reaches(children: Dict[str, List[str]], start: str, goal: str) -> bool:
    seen, stack = {start}, [start]
    while stack:
        node = stack.pop()
        if node == goal:
            return True
        for child in children.get(node, ()):
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return False


def _weakly_connected(g: AmrGraph) -> bool:
    neighbours = defaultdict(list)
    for source, _, target in g.relations:
        neighbours[source].append(target)
        neighbours[target].append(source)
    seen, stack = {g.root}, [g.root]
    while stack:
        for node in neighbours[stack.pop()]:
            if node not in seen:
                seen.add(node)
                stack.append(node)
    return len(seen) == len(g.instances)


def swap_relations(g: AmrGraph, e1: int, e2: int) -> Union[AmrGraph, Rejected]:
    """
    Exchange the targets of two relation edges.

    The input graph must be acyclic, so a cycle in the result has to run
    through one of the two new edges; only those are searched.

    Args:
        g: Valid AMR graph
        e1: Index of the first relation
        e2: Index of the second relation

    Returns:
        The rewired graph, or Rejected naming the violated constraint
    """
    if e1 == e2:
        raise ValueError("a relation cannot be swapped with itself")
    s1, r1, t1 = g.relations[e1]
    s2, r2, t2 = g.relations[e2]
    if t1 == t2:
        return Rejected("no-op", "relations share their target")
    if (s1, r1) == (s2, r2):
        return Rejected("no-op", "relations share source and role")
    if s1 == t2 or s2 == t1:
        return Rejected("self-edge", "swap would link a node to itself")

    pairs = {(s, t) for index, (s, _, t) in enumerate(g.relations) if index not in (e1, e2)}
    if (s1, t2) in pairs or (s2, t1) in pairs:
        return Rejected("multiedge", "swap would duplicate a node pair")

    relations = list(g.relations)
    relations[e1] = (s1, r1, t2)
    relations[e2] = (s2, r2, t1)
    rewired = g.with_edges(relations=relations)
    children = defaultdict(list)
    for source, _, target in relations:
        children[source].append(target)
    if _reaches(children, t2, s1) or _reaches(children, t1, s2):
        return Rejected("acyclicity", "swap would create a cycle")
    if not _weakly_connected(rewired):
        return Rejected("connectivity", "swap would disconnect the graph")
    return rewired


def swap_attributes(g: AmrGraph, a1: int, a2: int) -> Union[AmrGraph, Rejected]:
    """
    Exchange the source nodes of two attribute edges, keeping each attribute
    label with its constant.

    Returns:
        The rewired graph, or Rejected naming the violated constraint
    """
    if a1 == a2:
        raise ValueError("an attribute cannot be swapped with itself")
    s1, l1, c1 = g.attributes[a1]
    s2, l2, c2 = g.attributes[a2]
    if s1 == s2 or (l1, c1) == (l2, c2):
        return Rejected("no-op", "swap leaves the attribute set unchanged")

    rest = {attribute for index, attribute in enumerate(g.attributes) if index not in (a1, a2)}
    if (s2, l1, c1) in rest or (s1, l2, c2) in rest:
        return Rejected("multiedge", "swap would duplicate an attribute")

    attributes = list(g.attributes)
    attributes[a1] = (s2, l1, c1)
    attributes[a2] = (s1, l2, c2)
    return g.with_edges(attributes=attributes)


def _propose_swap(g: AmrGraph, rng: random.Random) -> Tuple[str, int, int]:
    """Sample a relation or attribute pair in proportion to the pair counts."""
    relation_pairs = math.comb(len(g.relations), 2)
    attribute_pairs = math.comb(len(g.attributes), 2)
    if rng.randrange(relation_pairs + attribute_pairs) < relation_pairs:
        e1, e2 = rng.sample(range(len(g.relations)), 2)
        return "relation", e1, e2
    a1, a2 = rng.sample(range(len(g.attributes)), 2)
    return "attribute", a1, a2


def _swap_gain(g: AmrGraph, original_edges: set, kind: str, i: int, j: int) -> int:
    """
    Change in the swapped-edge count if the swap were applied.

    Only meaningful for swaps that pass validation, where the two new edges
    are distinct and absent from the rest of the graph.
    """
    if kind == "relation":
        (s1, r1, t1), (s2, r2, t2) = old = g.relations[i], g.relations[j]
        new = ((s1, r1, t2), (s2, r2, t1))
    else:
        (s1, l1, c1), (s2, l2, c2) = old = g.attributes[i], g.attributes[j]
        new = ((s2, l1, c1), (s1, l2, c2))
    return sum(edge in original_edges for edge in old) - sum(edge in original_edges for edge in new)


def rewire_spectrum(g: AmrGraph, cfg: SpectrumConfig, entry_id: str = "g") -> List[RewiredPair]:
    """
    Rewire a graph over a spectrum of perturbation levels.

    Levels are reached cumulatively: each level continues from the graph of
    the previous one, accepting only valid swaps that raise the swapped-edge
    count, until it reaches ceil(level * |E|) or max_attempts consecutive
    proposals fail.

    Args:
        g: Valid graph with at least two edges of one kind
        cfg: Spectrum levels, attempt budget and seed
        entry_id: Source id used to name the pairs

    Returns:
        One RewiredPair per level; unreachable levels are flagged infeasible
    """
    total = g.edge_count
    if math.comb(len(g.relations), 2) + math.comb(len(g.attributes), 2) == 0:
        raise ValueError(f"{entry_id}: no pair of same-kind edges to swap")

    rng = random.Random(cfg.seed)
    max_attempts = cfg.attempts_for(g)
    original_edges = set(g.relations) | set(g.attributes)
    current, swapped = g, 0
    pairs = []
    for position, level in enumerate(cfg.levels):
        target = math.ceil(level * total)
        failures = 0
        while swapped < target and failures < max_attempts:
            kind, i, j = _propose_swap(current, rng)
            gain = _swap_gain(current, original_edges, kind, i, j)
            if gain <= 0:
                failures += 1
                continue
            swap = swap_relations if kind == "relation" else swap_attributes
            candidate = swap(current, i, j)
            if isinstance(candidate, Rejected):
                failures += 1
                continue
            current, swapped, failures = candidate, swapped + gain, 0

        infeasible = swapped < target
        if infeasible:
            logger.warning(f"{entry_id}: {SpectrumInfeasible(level, swapped, target)}")
        pairs.append(RewiredPair(
            id=f"{entry_id}#{position}",
            original=g,
            rewired=current,
            total_edges=total,
            swapped_edges=swapped,
            source_id=entry_id,
            level=level,
            infeasible=infeasible,
        ))
    return pairs


def audit_pair(pair: RewiredPair) -> List[str]:
    """
    Check a rewired pair against the RARE guarantees.

    Returns:
        Descriptions of every violation (empty when the pair is sound)
    """
    problems = []
    g, h = pair.original, pair.rewired
    try:
        validate_graph(h)
    except GraphInvariantError as exc:
        problems.append(f"invalid rewired graph: {exc}")

    if g.instances != h.instances:
        problems.append("node sets or concepts differ")

    def degrees(graph: AmrGraph) -> Counter:
        counts = Counter()
        for source, _, target in graph.relations:
            counts[(source, 'out')] += 1
            counts[(target, 'in')] += 1
        for source, _, _ in graph.attributes:
            counts[(source, 'attr')] += 1
        return counts

    if degrees(g) != degrees(h):
        problems.append("node degrees changed")
    if Counter(role for _, role, _ in g.relations) != Counter(role for _, role, _ in h.relations):
        problems.append("role labels changed")
    if Counter((l, c) for _, l, c in g.attributes) != Counter((l, c) for _, l, c in h.attributes):
        problems.append("attribute/constant pairing changed")
    if pair.total_edges != g.edge_count:
        problems.append("total edge count mismatch")
    if swapped_edge_count(g, h) != pair.swapped_edges:
        problems.append("swapped edge count does not match the graphs")
    if not 0 <= pair.swapped_edges <= pair.total_edges:
        problems.append("swapped edge count out of range")
    return problems


def split_sizes(count: int, split: Sequence[float]) -> Tuple[int, int, int]:
    """
    Source-graph counts per split: train and dev are floored, test takes the rest.

    Raises:
        ValueError if the fractions are negative or do not sum to 1
    """
    if len(split) != 3 or any(f < 0 for f in split):
        raise ValueError(f"split must be three non-negative fractions, got {split}")
    fractions = [Fraction(str(f)) for f in split]
    if sum(fractions) != 1:
        raise ValueError(f"split fractions must sum to 1, got {split}")
    train = math.floor(fractions[0] * count)
    dev = math.floor(fractions[1] * count)
    return train, dev, count - train - dev


def _rewire_entry(job: Tuple[CorpusEntry, SpectrumConfig]) -> List[RewiredPair]:
    entry, cfg = job
    return rewire_spectrum(entry.graph, cfg, entry.id)


def build_dataset(corpus: Sequence[CorpusEntry], cfg: SpectrumConfig,
                  split: Sequence[float] = DEFAULT_SPLIT, out_dir: Optional[str] = None,
                  jobs: int = 1, show_progress: bool = True) -> Dict[str, List[RewiredPair]]:
    """
    Build the train/dev/test RARE splits from a corpus.

    Entries are shuffled by seed and split at the source-graph level; each
    entry is rewired with its own derived seed (seed XOR entry index), so the
    output does not depend on the number of workers.

    Args:
        corpus: Parsed corpus entries
        cfg: Spectrum configuration
        split: (train, dev, test) fractions
        out_dir: When given, write `<split>.jsonl` files and stats.json there
        jobs: Worker processes for rewiring
        show_progress: Display a progress bar

    Returns:
        Mapping of split name to its pairs
    """
    if not corpus:
        raise EmptyCorpus("cannot build a dataset from an empty corpus")
    sizes = split_sizes(len(corpus), split)

    jobs_list = []
    for index, entry in enumerate(corpus):
        if math.comb(len(entry.graph.relations), 2) + math.comb(len(entry.graph.attributes), 2) == 0:
            logger.warning(f"Skipping {entry.id}: no swappable edge pair")
            continue
        derived = SpectrumConfig(levels=cfg.levels, max_attempts=cfg.max_attempts, seed=cfg.seed ^ index)
        jobs_list.append((entry, derived))

    progress = dict(total=len(jobs_list), desc="Rewiring graphs", disable=not show_progress)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(tqdm(executor.map(_rewire_entry, jobs_list, chunksize=8), **progress))
    else:
        results = [_rewire_entry(job) for job in tqdm(jobs_list, **progress)]
    pairs_by_source = {job[0].id: pairs for job, pairs in zip(jobs_list, results)}

    order = list(range(len(corpus)))
    random.Random(cfg.seed).shuffle(order)
    bounds = [0, sizes[0], sizes[0] + sizes[1], len(corpus)]
    dataset: Dict[str, List[RewiredPair]] = {}
    stats = {}
    for name, start, end in zip(SPLIT_NAMES, bounds, bounds[1:]):
        sources = [corpus[i].id for i in order[start:end]]
        pairs = [pair for source in sources for pair in pairs_by_source.get(source, [])]
        dataset[name] = pairs
        stats[name] = {
            "graphs": len(sources),
            "pairs": len(pairs),
            "infeasible": sum(pair.infeasible for pair in pairs),
        }
        logger.info(f"{name}: {len(sources)} source graphs, {len(pairs)} pairs")

    if out_dir is not None:
        write_dataset(dataset, stats, out_dir)
    return dataset


def write_dataset(dataset: Dict[str, List[RewiredPair]], stats: Dict, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for name, pairs in dataset.items():
        write_pairs(pairs, os.path.join(out_dir, f"{name}.jsonl"))
    with open(os.path.join(out_dir, STATS_FILE), 'w', encoding='utf-8') as f:
        json.dump(stats, f, indent=2, sort_keys=True)
        f.write("\n")


def write_pairs(pairs: Sequence[RewiredPair], path: str) -> None:
    """Write pairs as JSON lines, one record per pair."""
    with open(path, 'w', encoding='utf-8') as f:
        for pair in pairs:
            f.write(json.dumps(pair.to_record(), ensure_ascii=False))
            f.write("\n")
    logger.info(f"Wrote {len(pairs)} pairs to {path}")


def read_dataset(path: str) -> List[RewiredPair]:
    """Read a RARE JSON-lines file."""
    pairs = []
    with open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            try:
                pairs.append(RewiredPair.from_record(record))
            except KeyError as exc:
                raise MalformedRecord(path, number, f"missing field {exc}") from exc
            except (TypeError, ValueError) as exc:
                raise MalformedRecord(path, number, str(exc)) from exc
    logger.info(f"Read {len(pairs)} pairs from {path}")
    return pairs
