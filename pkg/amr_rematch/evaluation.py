"""
Evaluation Module

Scores metrics against gold similarity: structural consistency on RARE
datasets, semantic consistency on human-rated sentence pairs, motif-kind
ablations, and runtime benchmarks with log-log scaling fits.
"""

import itertools
import json
import logging
import math
import random
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import rankdata
from tqdm import tqdm

from amr_rematch.amr_core import AmrGraph, CorpusEntry, graph_size, parse_penman
from amr_rematch.config import (
    DEFAULT_BENCH_PAIRS, DEFAULT_INVERT_NORMALIZE, DEFAULT_SEED, FIT_MIN_LOG10_N, MOTIF_KINDS
)
from amr_rematch.exceptions import DegenerateInput, InsufficientCorpus, MalformedRecord, NonFiniteScore
from amr_rematch.metrics import MetricOptions, get_metric, score_pair, search_space
from amr_rematch.rare import RewiredPair, read_dataset

logger = logging.getLogger(__name__)

PairJob = Tuple[str, AmrGraph, AmrGraph, MetricOptions]


@dataclass(frozen=True)
class ScoredPair:
    id: str
    metric_score: float
    gold_score: float
    level: Optional[float] = None


@dataclass
class CorrelationReport:
    """Spearman correlation of one metric against gold scores."""

    metric: str
    rho: float
    scored: List[ScoredPair] = field(default_factory=list)
    per_level: Dict[float, float] = field(default_factory=dict)

    @property
    def percent(self) -> float:
        return self.rho * 100

    @property
    def n(self) -> int:
        return len(self.scored)


def spearman(pairs: Sequence[ScoredPair]) -> float:
    """
    Spearman rank correlation between metric and gold scores.

    Ties get the average of their ranks; the result is the Pearson correlation
    of the two rank vectors.

    Args:
        pairs: Scored pairs

    Returns:
        rho in [-1, 1]

    Raises:
        DegenerateInput when there are fewer than two pairs or either column is constant
        NonFiniteScore when a score is NaN or infinite
    """
    if len(pairs) < 2:
        raise DegenerateInput("size", f"need at least two pairs, got {len(pairs)}")
    metric = np.array([pair.metric_score for pair in pairs], dtype=float)
    gold = np.array([pair.gold_score for pair in pairs], dtype=float)
    if not (np.all(np.isfinite(metric)) and np.all(np.isfinite(gold))):
        raise NonFiniteScore("scores must be finite")

    metric_constant = bool(np.all(metric == metric[0]))
    gold_constant = bool(np.all(gold == gold[0]))
    if metric_constant and gold_constant:
        raise DegenerateInput("both")
    if metric_constant:
        raise DegenerateInput("metric")
    if gold_constant:
        raise DegenerateInput("gold")

    rho = np.corrcoef(rankdata(metric), rankdata(gold))[0, 1]
    return float(np.clip(rho, -1.0, 1.0))


def _score_job(job: Tuple[str, PairJob]) -> float:
    metric, (_, g1, g2, options) = job
    return float(score_pair(metric, g1, g2, options).value)


def score_pairs(metric: str, jobs_list: Sequence[PairJob], jobs: int = 1,
                show_progress: bool = True) -> List[float]:
    """
    Score many pairs with one metric, keeping input order.

    Args:
        metric: Metric name
        jobs_list: (id, g1, g2, options) tuples
        jobs: Worker processes (1 scores in-process)
        show_progress: Display a progress bar

    Returns:
        Scores as floats, aligned with jobs_list
    """
    get_metric(metric)
    work = [(metric, job) for job in jobs_list]
    progress = dict(total=len(work), desc=f"Scoring with {metric}", disable=not show_progress)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return list(tqdm(executor.map(_score_job, work, chunksize=16), **progress))
    return [_score_job(item) for item in tqdm(work, **progress)]


def _correlate(metric: str, scored: List[ScoredPair], per_level: Dict[float, float]) -> CorrelationReport:
    rho = spearman(scored)
    logger.info(f"{metric}: Spearman {rho * 100:.2f} over {len(scored)} pairs")
    return CorrelationReport(metric=metric, rho=rho, scored=scored, per_level=per_level)


def level_means(scored: Sequence[ScoredPair]) -> Dict[float, float]:
    """Mean metric score per swap level, ordered by level."""
    groups = defaultdict(list)
    for pair in scored:
        level = pair.level if pair.level is not None else 1 - pair.gold_score
        groups[level].append(pair.metric_score)
    return {level: float(np.mean(groups[level])) for level in sorted(groups)}


def eval_structural(dataset: Union[str, Sequence[RewiredPair]], metric: str,
                    options: Optional[MetricOptions] = None, jobs: int = 1,
                    show_progress: bool = True) -> CorrelationReport:
    """
    Structural consistency: correlation between a metric and RARE gold scores.

    Args:
        dataset: Path of a RARE JSON-lines file, or the pairs themselves
        metric: Metric name
        options: Metric options
        jobs: Worker processes
        show_progress: Display a progress bar

    Returns:
        CorrelationReport with the per-level mean score table

    Raises:
        DegenerateInput when the metric or gold scores are constant
    """
    pairs = read_dataset(dataset) if isinstance(dataset, str) else list(dataset)
    options = options or MetricOptions()
    jobs_list = [(pair.id, pair.original, pair.rewired, options) for pair in pairs]
    values = score_pairs(metric, jobs_list, jobs, show_progress)
    scored = [
        ScoredPair(pair.id, value, float(pair.gold), pair.level)
        for pair, value in zip(pairs, values)
    ]
    return _correlate(metric, scored, level_means(scored))


def read_semantic_pairs(path: str, invert_normalize: bool = DEFAULT_INVERT_NORMALIZE
                        ) -> List[Tuple[str, AmrGraph, AmrGraph, float]]:
    """Read `{id, gold, amr_a, amr_b}` JSON lines."""
    rows = []
    with open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            if not isinstance(record, dict):
                raise MalformedRecord(path, number, "expected a JSON object")
            try:
                pair_id, amr_a, amr_b = str(record["id"]), record["amr_a"], record["amr_b"]
                gold = float(record["gold"])
            except KeyError as exc:
                raise MalformedRecord(path, number, f"missing field {exc}") from exc
            except (TypeError, ValueError) as exc:
                raise MalformedRecord(path, number, f"gold is not a number: {record['gold']!r}") from exc
            if not math.isfinite(gold):
                raise MalformedRecord(path, number, f"gold must be finite, got {gold}")
            rows.append((
                pair_id,
                parse_penman(amr_a, invert_normalize),
                parse_penman(amr_b, invert_normalize),
                gold,
            ))
    logger.info(f"Read {len(rows)} rated pairs from {path}")
    return rows


def eval_semantic(pairs: Union[str, Sequence[Tuple[str, AmrGraph, AmrGraph, float]]], metric: str,
                  options: Optional[MetricOptions] = None, jobs: int = 1,
                  invert_normalize: bool = DEFAULT_INVERT_NORMALIZE,
                  show_progress: bool = True) -> CorrelationReport:
    """
    Semantic consistency: correlation between a metric and human similarity ratings.

    Args:
        pairs: Path of a JSON-lines file, or (id, amr_a, amr_b, gold) tuples
        metric: Metric name
        options: Metric options
        jobs: Worker processes
        invert_normalize: Flip `-of` roles when parsing from a file

    Returns:
        CorrelationReport
    """
    rows = read_semantic_pairs(pairs, invert_normalize) if isinstance(pairs, str) else list(pairs)
    options = options or MetricOptions()
    values = score_pairs(metric, [(pid, g1, g2, options) for pid, g1, g2, _ in rows], jobs, show_progress)
    scored = [ScoredPair(pid, value, gold) for (pid, _, _, gold), value in zip(rows, values)]
    return _correlate(metric, scored, {})


def kind_subsets() -> List[frozenset]:
    """Every non-empty subset of motif kinds, largest first."""
    subsets = []
    for size in range(len(MOTIF_KINDS), 0, -1):
        subsets.extend(frozenset(combo) for combo in itertools.combinations(MOTIF_KINDS, size))
    return subsets


def subset_name(kinds: frozenset) -> str:
    return "+".join(kind[0] for kind in MOTIF_KINDS if kind in kinds)


def eval_ablation(dataset: Union[str, Sequence[RewiredPair]], options: Optional[MetricOptions] = None,
                  jobs: int = 1, show_progress: bool = True) -> List[Tuple[str, Optional[float]]]:
    """
    Structural consistency of rematch for every subset of motif kinds, plus
    the label-set baseline.

    Returns:
        (name, rho) rows; rho is None when the correlation is undefined
    """
    pairs = read_dataset(dataset) if isinstance(dataset, str) else list(dataset)
    options = options or MetricOptions()
    runs = [(subset_name(kinds), "rematch", replace(options, kinds=kinds)) for kinds in kind_subsets()]
    runs.append(("labels", "labels", options))
    rows = []
    for name, metric, run_options in runs:
        try:
            report = eval_structural(pairs, metric, run_options, jobs, show_progress)
            rows.append((name, report.rho))
        except DegenerateInput as exc:
            logger.warning(f"{name}: correlation undefined ({exc})")
            rows.append((name, None))
    return rows


# Benchmarks

@dataclass(frozen=True)
class BenchRecord:
    id: str
    metric: str
    n: float
    search_space: int
    runtime_ns: int


@dataclass(frozen=True)
class ScalingFit:
    metric: str
    slope: float
    intercept: float
    points: int


def sample_pairs(corpus: Sequence[CorpusEntry], count: int, seed: int = DEFAULT_SEED) -> List[Tuple[int, int]]:
    """Sample distinct unordered index pairs without replacement."""
    if len(corpus) < 2:
        raise InsufficientCorpus(f"need at least two graphs, got {len(corpus)}")
    total = math.comb(len(corpus), 2)
    if count > total:
        logger.warning(f"Requested {count} pairs but only {total} exist")
        count = total
    chosen = random.Random(seed).sample(range(total), count)
    return [pair_at(index, len(corpus)) for index in chosen]


def pair_at(index: int, n: int) -> Tuple[int, int]:
    """
    The index-th pair (i, j), i < j, of range(n) in lexicographic order.

    Matches `list(itertools.combinations(range(n), 2))[index]` without
    building the list.
    """
    if not 0 <= index < math.comb(n, 2):
        raise IndexError(f"pair index {index} out of range for {n} items")

    def offset(i: int) -> int:
        # Pairs whose first item is below i
        return i * (2 * n - i - 1) // 2

    i = (2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * index)) // 2
    while i > 0 and offset(i) > index:
        i -= 1
    while offset(i + 1) <= index:
        i += 1
    return i, i + 1 + index - offset(i)


def bench(corpus: Sequence[CorpusEntry], pairs: int = DEFAULT_BENCH_PAIRS,
          metrics: Sequence[str] = ("rematch", "smatch"), seed: int = DEFAULT_SEED,
          options: Optional[MetricOptions] = None, repeat: int = 1,
          show_progress: bool = True) -> List[BenchRecord]:
    """
    Time each metric on sampled graph pairs.

    Only the scoring call is timed; parsing and extraction setup happen
    before the clock starts. With repeat > 1 the fastest run is kept.

    Args:
        corpus: Parsed corpus
        pairs: Number of pairs to sample
        metrics: Metric names to time
        seed: Sampling seed
        options: Metric options
        repeat: Timed runs per pair and metric

    Returns:
        One BenchRecord per pair and metric, in sample order
    """
    options = options or MetricOptions(seed=seed)
    for metric in metrics:
        get_metric(metric)
    records = []
    for i, j in tqdm(sample_pairs(corpus, pairs, seed), desc="Benchmarking", disable=not show_progress):
        a, b = corpus[i], corpus[j]
        n = (graph_size(a.graph) + graph_size(b.graph)) / 2
        for metric in metrics:
            scorer = get_metric(metric)
            timings = []
            for _ in range(max(1, repeat)):
                start = time.perf_counter_ns()
                scorer(a.graph, b.graph, options)
                timings.append(time.perf_counter_ns() - start)
            records.append(BenchRecord(
                id=f"{a.id}|{b.id}",
                metric=metric,
                n=n,
                search_space=search_space(metric, a.graph, b.graph, options),
                runtime_ns=min(timings),
            ))
    return records


def fit_scaling(records: Sequence[BenchRecord], min_log10_n: float = FIT_MIN_LOG10_N) -> Dict[str, ScalingFit]:
    """
    Least-squares line through log10(runtime) against log10(N) per metric.

    Only pairs with log10(N) > min_log10_n take part, where the per-call
    overhead no longer dominates.

    Returns:
        Fits keyed by metric; metrics with fewer than two distinct sizes are left out
    """
    by_metric = defaultdict(list)
    for record in records:
        if record.n > 0 and math.log10(record.n) > min_log10_n:
            by_metric[record.metric].append(record)

    fits = {}
    for metric, selected in by_metric.items():
        x = np.log10([record.n for record in selected])
        y = np.log10([max(record.runtime_ns, 1) for record in selected])
        if len(np.unique(x)) < 2:
            logger.warning(f"{metric}: not enough distinct graph sizes to fit scaling")
            continue
        slope, intercept = np.polyfit(x, y, 1)
        fits[metric] = ScalingFit(metric, float(slope), float(intercept), len(selected))
        logger.info(f"{metric}: runtime ~ N^{slope:.2f} over {len(selected)} pairs")
    return fits


def search_space_summary(records: Sequence[BenchRecord], bin_width: float = 0.25
                         ) -> Dict[str, List[Tuple[float, float]]]:
    """
    Mean log10 search space per log10(N) bin, per metric.

    Returns:
        metric -> [(bin start, mean log10 search space)], bins ascending
    """
    bins = defaultdict(lambda: defaultdict(list))
    for record in records:
        if record.n <= 0 or record.search_space <= 0:
            continue
        start = math.floor(math.log10(record.n) / bin_width) * bin_width
        bins[record.metric][start].append(math.log10(record.search_space))
    return {
        metric: [(start, float(np.mean(values))) for start, values in sorted(groups.items())]
        for metric, groups in bins.items()
    }
