"""
Main Module

Command-line entry point: parse, motifs, score, rare, eval-structural,
eval-semantic, ablation, bench and synth subcommands.

Exit codes: 0 on success, 1 on a usage error, 2 on a data error.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from amr_rematch.amr_core import format_entry, graph_size, load_corpus
from amr_rematch.config import (
    AMR_FRAMES, DEFAULT_BENCH_PAIRS, DEFAULT_CANDIDATES, DEFAULT_JOBS, DEFAULT_LEVELS, DEFAULT_METRIC,
    DEFAULT_SEED, DEFAULT_SMATCH_RESTARTS, DEFAULT_SPLIT, LOG_FORMAT, LOG_LEVEL, METRIC_NAMES,
    SMATCH_EXACT_LIMIT, SYNTH_CORPUS_SIZE, SYNTH_MAX_SIZE, SYNTH_MIN_SIZE, get_dataset_name_from_file
)
from amr_rematch.evaluation import (
    CorrelationReport, bench, eval_ablation, eval_semantic, eval_structural, fit_scaling, score_pairs,
    search_space_summary
)
from amr_rematch.exceptions import AmrRematchError, CorpusLengthMismatch
from amr_rematch.formatting import (
    bench_csv, format_ablation_table, format_correlation_report, format_motifs, format_score,
    format_score_rows, format_scaling
)
from amr_rematch.metrics import CANDIDATE_MODES, MetricOptions
from amr_rematch.motifs import load_frame_map, motif_set, parse_kinds
from amr_rematch.rare import SpectrumConfig, build_dataset
from amr_rematch.synthetic import synthetic_corpus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _kinds(text: str):
    try:
        return parse_kinds(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _metric_list(text: str) -> List[str]:
    names = [name.strip() for name in text.split(',') if name.strip()]
    unknown = [name for name in names if name not in METRIC_NAMES]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f"unknown metrics {unknown}, choose from {', '.join(METRIC_NAMES)}")
    return names


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true', help='Log debug messages')
    common.add_argument('--quiet', action='store_true', help='Only log warnings and hide progress bars')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED,
                        help=f'Seed for every random choice (default: {DEFAULT_SEED})')
    common.add_argument('--jobs', type=int, default=DEFAULT_JOBS,
                        help=f'Worker processes; output order never depends on it (default: {DEFAULT_JOBS})')
    common.add_argument('--out', help='Output path (default: stdout)')
    common.add_argument('--no-invert-normalize', dest='invert_normalize', action='store_false',
                        help='Keep :ROLE-of edges as written instead of flipping them')

    scoring = ArgumentParser(add_help=False)
    scoring.add_argument('--frames', default=AMR_FRAMES,
                         help='PropBank -> generalized frame TSV (default: $AMR_FRAMES, none when unset)')
    scoring.add_argument('--kinds', type=_kinds, default=None,
                         help='Motif kinds for rematch, e.g. a,i,r (default: all)')
    scoring.add_argument('--restarts', type=int, default=DEFAULT_SMATCH_RESTARTS,
                         help=f'smatch hill-climbing restarts (default: {DEFAULT_SMATCH_RESTARTS})')
    scoring.add_argument('--exact-limit', type=int, default=SMATCH_EXACT_LIMIT,
                         help=f'smatch enumerates alignments exhaustively up to this many (default: {SMATCH_EXACT_LIMIT})')
    scoring.add_argument('--candidates', choices=CANDIDATE_MODES, default=DEFAULT_CANDIDATES,
                         help='Candidate rule for the alignment search space (default: all)')

    parser = ArgumentParser(prog='amr-rematch', description='Motif-based AMR similarity and the RARE benchmark')
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    cmd = subparsers.add_parser('parse', parents=[common], help='Parse and normalize a Penman corpus')
    cmd.add_argument('file', help='Penman corpus file')
    cmd.add_argument('--on-error', choices=('raise', 'skip'), default='raise',
                     help='Fail on the first bad block or skip it with a warning')
    cmd.add_argument('--format', choices=('penman', 'jsonl'), default='penman',
                     help='Normalized Penman blocks or one JSON summary per graph')

    cmd = subparsers.add_parser('motifs', parents=[common, scoring], help='Print the sorted motif set of each graph')
    cmd.add_argument('file', help='Penman corpus file')

    cmd = subparsers.add_parser('score', parents=[common, scoring], help='Score paired graphs block by block')
    cmd.add_argument('metric', choices=METRIC_NAMES, help='Similarity metric')
    cmd.add_argument('file_a', help='First Penman corpus')
    cmd.add_argument('file_b', help='Second Penman corpus with the same number of graphs')
    cmd.add_argument('--format', choices=('tsv', 'jsonl'), default='tsv', help='Output format')

    cmd = subparsers.add_parser('rare', parents=[common], help='Build a RARE benchmark from a corpus')
    cmd.add_argument('corpus', help='Penman corpus file')
    cmd.add_argument('--levels', type=_float_list, default=list(DEFAULT_LEVELS),
                     help='Ascending swap levels in [0, 1] (default: 0,1/8,...,1)')
    cmd.add_argument('--split', type=_float_list, default=list(DEFAULT_SPLIT),
                     help='train,dev,test fractions of source graphs (default: 0.8,0.1,0.1)')
    cmd.add_argument('--max-attempts', type=int, default=None,
                     help='Consecutive failed swaps before a level is flagged infeasible (default: 100 x edges)')

    for name, help_text in (('eval-structural', 'Correlate a metric with RARE gold scores'),
                            ('eval-semantic', 'Correlate a metric with human similarity ratings')):
        cmd = subparsers.add_parser(name, parents=[common, scoring], help=help_text)
        cmd.add_argument('dataset', help='JSON-lines pairs file')
        cmd.add_argument('--metric', choices=METRIC_NAMES, default=DEFAULT_METRIC, help='Similarity metric')

    cmd = subparsers.add_parser('ablation', parents=[common, scoring],
                                help='Structural consistency of every motif-kind subset')
    cmd.add_argument('dataset', help='RARE JSON-lines file')

    cmd = subparsers.add_parser('bench', parents=[common, scoring], help='Time metrics on sampled graph pairs')
    cmd.add_argument('corpus', help='Penman corpus file')
    cmd.add_argument('--pairs', type=int, default=DEFAULT_BENCH_PAIRS, help='Number of sampled pairs')
    cmd.add_argument('--metrics', type=_metric_list, default=['rematch', 'smatch'],
                     help='Comma-separated metrics to time (default: rematch,smatch)')
    cmd.add_argument('--repeat', type=int, default=1, help='Timed runs per pair; the fastest is kept')

    cmd = subparsers.add_parser('synth', parents=[common], help='Generate a random AMR corpus')
    cmd.add_argument('--count', type=int, default=SYNTH_CORPUS_SIZE, help='Number of graphs')
    cmd.add_argument('--min-size', type=int, default=SYNTH_MIN_SIZE, help='Smallest graph size')
    cmd.add_argument('--max-size', type=int, default=SYNTH_MAX_SIZE, help='Largest graph size')
    return parser


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every subcommand, resolved from flags over config defaults."""

    command: str
    inputs: Tuple[str, ...]
    seed: int
    jobs: int
    out: Optional[str]
    output_format: Optional[str]
    invert_normalize: bool
    show_progress: bool
    frames_path: Optional[str] = None
    options: MetricOptions = field(default_factory=MetricOptions)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        inputs = tuple(getattr(args, name) for name in ('file', 'file_a', 'file_b', 'corpus', 'dataset')
                       if getattr(args, name, None) is not None)
        frames_path = getattr(args, 'frames', None)
        options = MetricOptions(seed=args.seed)
        if hasattr(args, 'restarts'):
            options = MetricOptions(
                frames=load_frame_map(frames_path),
                restarts=args.restarts,
                seed=args.seed,
                candidates=args.candidates,
                exact_limit=args.exact_limit,
            )
            if args.kinds is not None:
                options = replace(options, kinds=args.kinds)
        return cls(
            command=args.command,
            inputs=inputs,
            seed=args.seed,
            jobs=args.jobs,
            out=args.out,
            output_format=getattr(args, 'format', None),
            invert_normalize=args.invert_normalize,
            show_progress=not args.quiet,
            frames_path=frames_path,
            options=options,
        )


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else LOG_LEVEL
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
        print(f"💾 Wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _load(path: str, cfg: RunConfig, on_error: str = "raise"):
    return load_corpus(path, on_error, cfg.invert_normalize, show_progress=cfg.show_progress)


def _log_seed(metric: str, cfg: RunConfig) -> None:
    if metric == 'smatch':
        logger.info(f"Using seed {cfg.seed} for smatch restarts")


def cmd_parse(args: argparse.Namespace, cfg: RunConfig) -> int:
    entries = _load(args.file, cfg, args.on_error)
    if cfg.output_format == 'jsonl':
        lines = [json.dumps({
            "id": entry.id,
            "size": graph_size(entry.graph),
            "instances": len(entry.graph.instances),
            "relations": len(entry.graph.relations),
            "attributes": len(entry.graph.attributes),
        }) for entry in entries]
        text = "".join(line + "\n" for line in lines)
    else:
        text = "".join(format_entry(entry) + "\n\n" for entry in entries)
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_motifs(args: argparse.Namespace, cfg: RunConfig) -> int:
    entries = _load(args.file, cfg)
    text = "".join(
        format_motifs(entry.id, motif_set(entry.graph, cfg.options.frames, cfg.options.kinds), len(entries) > 1)
        for entry in entries
    )
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_score(args: argparse.Namespace, cfg: RunConfig) -> int:
    left = _load(args.file_a, cfg)
    right = _load(args.file_b, cfg)
    if len(left) != len(right):
        raise CorpusLengthMismatch(len(left), len(right))
    _log_seed(args.metric, cfg)
    jobs_list = [(a.id, a.graph, b.graph, cfg.options) for a, b in zip(left, right)]
    values = score_pairs(args.metric, jobs_list, cfg.jobs, show_progress=cfg.show_progress)
    _emit(format_score_rows(zip((a.id for a in left), values), cfg.output_format), cfg.out)
    return EXIT_OK


def cmd_rare(args: argparse.Namespace, cfg: RunConfig) -> int:
    logger.info(f"Using seed {cfg.seed}")
    corpus = _load(args.corpus, cfg)
    spectrum = SpectrumConfig(levels=tuple(args.levels), max_attempts=args.max_attempts, seed=cfg.seed)
    out_dir = cfg.out or get_dataset_name_from_file(args.corpus)
    dataset = build_dataset(corpus, spectrum, tuple(args.split), out_dir, cfg.jobs,
                            show_progress=cfg.show_progress)
    print(f"✅ RARE dataset written to {out_dir}", file=sys.stderr)
    for name, pairs in dataset.items():
        infeasible = sum(pair.infeasible for pair in pairs)
        print(f"   {name}: {len(pairs)} pairs ({infeasible} flagged infeasible)", file=sys.stderr)
    return EXIT_OK


def _scored_rows(report: CorrelationReport) -> str:
    return "".join(
        f"{pair.id}\t{format_score(pair.metric_score)}\t{format_score(pair.gold_score)}\n"
        for pair in report.scored
    )


def cmd_eval_structural(args: argparse.Namespace, cfg: RunConfig) -> int:
    _log_seed(args.metric, cfg)
    report = eval_structural(args.dataset, args.metric, cfg.options, cfg.jobs, show_progress=cfg.show_progress)
    print(format_correlation_report(report), end="")
    if cfg.out:
        _emit(_scored_rows(report), cfg.out)
    return EXIT_OK


def cmd_eval_semantic(args: argparse.Namespace, cfg: RunConfig) -> int:
    _log_seed(args.metric, cfg)
    report = eval_semantic(args.dataset, args.metric, cfg.options, cfg.jobs, cfg.invert_normalize,
                           show_progress=cfg.show_progress)
    print(format_correlation_report(report, show_levels=False), end="")
    if cfg.out:
        _emit(_scored_rows(report), cfg.out)
    return EXIT_OK


def cmd_ablation(args: argparse.Namespace, cfg: RunConfig) -> int:
    rows = eval_ablation(args.dataset, cfg.options, cfg.jobs, show_progress=cfg.show_progress)
    _emit(format_ablation_table(rows), cfg.out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, cfg: RunConfig) -> int:
    logger.info(f"Using seed {cfg.seed}")
    if cfg.jobs > 1:
        logger.info("Timing runs in a single process; --jobs is ignored")
    corpus = _load(args.corpus, cfg)
    records = bench(corpus, args.pairs, args.metrics, cfg.seed, cfg.options, args.repeat,
                    show_progress=cfg.show_progress)
    _emit(bench_csv(records), cfg.out)
    print(format_scaling(fit_scaling(records), search_space_summary(records)), end="", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, cfg: RunConfig) -> int:
    logger.info(f"Using seed {cfg.seed}")
    entries = synthetic_corpus(args.count, cfg.seed, args.min_size, args.max_size)
    _emit("\n\n".join(format_entry(entry) for entry in entries) + "\n", cfg.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    'parse': cmd_parse,
    'motifs': cmd_motifs,
    'score': cmd_score,
    'rare': cmd_rare,
    'eval-structural': cmd_eval_structural,
    'eval-semantic': cmd_eval_semantic,
    'ablation': cmd_ablation,
    'bench': cmd_bench,
    'synth': cmd_synth,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK

    setup_logging(args.verbose, args.quiet)
    if args.jobs < 1:
        print("❌ --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = RunConfig.from_args(args)
        logger.debug(f"Run configuration: {cfg}")
        return COMMANDS[args.command](args, cfg)
    except (AmrRematchError, OSError, json.JSONDecodeError, KeyError) as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_DATA
    except ValueError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    """Console script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
