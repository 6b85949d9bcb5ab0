"""
Formatting Module

Handles result display and the TSV, CSV and JSON-lines output formats.
"""

import csv
import io
import json
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from amr_rematch.config import SCORE_DECIMALS
from amr_rematch.evaluation import BenchRecord, CorrelationReport, ScalingFit


def format_score(value: float, decimals: int = SCORE_DECIMALS) -> str:
    return f"{float(value):.{decimals}f}"


def format_score_rows(rows: Iterable[Tuple[str, float]], fmt: str = "tsv") -> str:
    """
    Render (id, score) rows.

    Args:
        rows: Pair ids with their scores
        fmt: "tsv" for `id<TAB>score` lines, "jsonl" for `{"id", "score"}` records

    Returns:
        Text ending with a newline (empty for no rows)
    """
    lines = []
    for pair_id, value in rows:
        if fmt == "jsonl":
            lines.append(json.dumps({"id": pair_id, "score": round(float(value), SCORE_DECIMALS)}))
        elif fmt == "tsv":
            lines.append(f"{pair_id}\t{format_score(value)}")
        else:
            raise ValueError(f"unknown output format {fmt!r}")
    return "".join(line + "\n" for line in lines)


def format_motifs(entry_id: str, motifs: Iterable[str], with_header: bool) -> str:
    lines = [f"# ::id {entry_id}"] if with_header else []
    lines.extend(sorted(motifs))
    return "".join(line + "\n" for line in lines)


def write_bench_csv(records: Sequence[BenchRecord], out: TextIO) -> None:
    """Write `id,metric,N,search_space,runtime_ns` rows."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["id", "metric", "N", "search_space", "runtime_ns"])
    for record in records:
        writer.writerow([record.id, record.metric, f"{record.n:g}", record.search_space, record.runtime_ns])


def bench_csv(records: Sequence[BenchRecord]) -> str:
    buffer = io.StringIO()
    write_bench_csv(records, buffer)
    return buffer.getvalue()


def format_correlation_report(report: CorrelationReport, show_levels: bool = True) -> str:
    """Human-readable summary of a correlation run."""
    lines = [
        f"📊 Metric: {report.metric}",
        f"🔢 Pairs: {report.n}",
        f"📈 Spearman x 100: {report.percent:.2f}",
    ]
    if show_levels and report.per_level:
        lines.append("-" * 40)
        lines.append(f"{'level':>8}  {'mean score':>10}")
        for level, mean in report.per_level.items():
            lines.append(f"{level:>8.3f}  {format_score(mean):>10}")
    return "\n".join(lines) + "\n"


def format_ablation_table(rows: Sequence[Tuple[str, Optional[float]]]) -> str:
    lines = [f"{'motifs':<10}{'spearman x 100':>16}", "=" * 26]
    for name, rho in rows:
        value = "undefined" if rho is None else f"{rho * 100:.2f}"
        lines.append(f"{name:<10}{value:>16}")
    return "\n".join(lines) + "\n"


def format_scaling(fits: Dict[str, ScalingFit], summary: Dict[str, List[Tuple[float, float]]]) -> str:
    """Scaling slopes followed by the mean log10 search space per size bin."""
    lines = []
    for metric, fit in sorted(fits.items()):
        lines.append(f"⏱️ {metric}: runtime ~ N^{fit.slope:.2f} ({fit.points} pairs)")
    for metric, bins in sorted(summary.items()):
        lines.append(f"🔎 {metric} search space (log10 N bin -> mean log10 size):")
        for start, mean in bins:
            lines.append(f"   {start:5.2f}  {mean:10.2f}")
    return "\n".join(lines) + ("\n" if lines else "")
