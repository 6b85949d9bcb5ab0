#!/usr/bin/env python3
"""
Tests for RARE edge swaps, spectrum rewiring and dataset construction
"""

import itertools
import json
import os
import random
from fractions import Fraction

import networkx as nx
import pytest

from amr_rematch.amr_core import AmrGraph, Constant, parse_penman, to_networkx, validate_graph
from amr_rematch.exceptions import EmptyCorpus, MalformedRecord
from amr_rematch.rare import (
    Rejected, RewiredPair, SpectrumConfig, audit_pair, build_dataset, read_dataset, rewire_spectrum, split_sizes,
    swap_attributes, swap_relations, swapped_edge_count, write_pairs
)
from amr_rematch.synthetic import random_graph


def _graph(relations, attributes=(), root="r"):
    nodes = {root}
    for source, _, target in relations:
        nodes.update((source, target))
    return AmrGraph(root=root, instances={node: f"c-{node}" for node in sorted(nodes)},
                    relations=tuple(relations), attributes=tuple(attributes))


def test_valid_relation_swap():
    g = _graph([("r", "ARG0", "a"), ("r", "ARG1", "c"), ("a", "ARG0", "b"), ("c", "ARG1", "d")])
    rewired = swap_relations(g, 2, 3)
    assert not isinstance(rewired, Rejected)
    assert rewired.relations[2:] == (("a", "ARG0", "d"), ("c", "ARG1", "b"))
    validate_graph(rewired)
    assert swapped_edge_count(g, rewired) == 2


def test_shared_target_swap_is_noop():
    g = _graph([("r", "ARG0", "a"), ("r", "ARG1", "c"), ("a", "ARG0", "b"), ("c", "ARG1", "b")])
    assert swap_relations(g, 2, 3) == Rejected("no-op", "relations share their target")


@pytest.mark.parametrize("relations, e1, e2, constraint", [
    ([("r", "ARG0", "a"), ("a", "ARG1", "b")], 0, 1, "self-edge"),
    ([("r", "ARG0", "a"), ("r", "ARG1", "b"), ("r", "ARG3", "c"), ("b", "ARG2", "c")], 0, 3, "multiedge"),
    ([("r", "ARG0", "a"), ("a", "ARG1", "b"), ("b", "ARG2", "c")], 0, 2, "acyclicity"),
])
def test_rejected_relation_swaps(relations, e1, e2, constraint):
    assert swap_relations(_graph(relations), e1, e2).constraint == constraint


def test_disconnecting_swap_is_rejected():
    g = AmrGraph(
        root="w",
        instances={"w": "want-01", "x": "say-01", "b": "boy", "q": "think-01", "p": "pizza"},
        relations=(("w", "ARG0", "b"), ("x", "ARG1", "p"), ("x", "ARG2", "q"), ("q", "ARG3", "b")),
    )
    assert swap_relations(g, 0, 1).constraint == "connectivity"


def test_relation_swaps_agree_with_graph_checks(small_graphs):
    for g in small_graphs:
        for e1, e2 in itertools.combinations(range(len(g.relations)), 2):
            result = swap_relations(g, e1, e2)
            if isinstance(result, Rejected) and result.constraint not in ("acyclicity", "connectivity"):
                continue
            relations = list(g.relations)
            (s1, r1, t1), (s2, r2, t2) = relations[e1], relations[e2]
            relations[e1], relations[e2] = (s1, r1, t2), (s2, r2, t1)
            dg = to_networkx(g.with_edges(relations=relations))
            if not nx.is_directed_acyclic_graph(dg):
                expected = "acyclicity"
            elif not nx.is_weakly_connected(dg):
                expected = "connectivity"
            else:
                expected = None
            assert (result.constraint if isinstance(result, Rejected) else None) == expected


def test_relation_cannot_swap_with_itself():
    g = _graph([("r", "ARG0", "a"), ("r", "ARG1", "b")])
    with pytest.raises(ValueError):
        swap_relations(g, 1, 1)


def test_attribute_swaps():
    polarity = Constant.from_token("-")
    quant = Constant.from_token("3")
    g = _graph([("r", "ARG0", "a")], [("r", "polarity", polarity), ("a", "quant", quant)])
    rewired = swap_attributes(g, 0, 1)
    assert set(rewired.attributes) == {("a", "polarity", polarity), ("r", "quant", quant)}
    assert swapped_edge_count(g, rewired) == 2

    same_source = _graph([("r", "ARG0", "a")], [("r", "polarity", polarity), ("r", "quant", quant)])
    assert swap_attributes(same_source, 0, 1).constraint == "no-op"

    duplicate = _graph([("r", "ARG0", "a")],
                       [("r", "polarity", polarity), ("a", "quant", quant), ("a", "polarity", polarity)])
    assert swap_attributes(duplicate, 0, 1).constraint == "multiedge"


def test_star_graph_reaches_full_rewiring():
    g = _graph([("r", "ARG0", "a"), ("r", "ARG1", "b"), ("r", "ARG2", "c")])
    pairs = rewire_spectrum(g, SpectrumConfig(levels=(0.0, 0.5, 1.0), seed=1))
    assert [pair.swapped_edges for pair in pairs] == [0, 2, 3]
    assert [pair.gold for pair in pairs] == [1, Fraction(1, 3), 0]
    assert not any(pair.infeasible for pair in pairs)
    assert [pair.id for pair in pairs] == ["g#0", "g#1", "g#2"]


def test_level_zero_keeps_the_graph(talk_graph):
    pair = rewire_spectrum(talk_graph, SpectrumConfig(levels=(0.0,)), entry_id="talk")[0]
    assert pair.rewired == talk_graph
    assert pair.gold == 1
    assert pair.source_id == "talk"


def test_unreachable_level_is_flagged(caplog):
    # The only relation pair would link a to itself
    g = _graph([("r", "ARG0", "a"), ("a", "ARG1", "b")])
    pairs = rewire_spectrum(g, SpectrumConfig(levels=(0.0, 1.0), max_attempts=5))
    assert pairs[1].infeasible
    assert pairs[1].swapped_edges == 0
    assert "level 1" in caplog.text


def test_graph_without_swappable_pair_is_refused():
    with pytest.raises(ValueError):
        rewire_spectrum(parse_penman("(a / amr-empty)"), SpectrumConfig())


def test_spectrum_config_validation():
    with pytest.raises(ValueError):
        SpectrumConfig(levels=())
    with pytest.raises(ValueError):
        SpectrumConfig(levels=(0.5, 0.2))
    with pytest.raises(ValueError):
        SpectrumConfig(levels=(0.0, 1.5))
    assert SpectrumConfig().attempts_for(_graph([("r", "ARG0", "a")])) == 100


def test_rewired_pairs_pass_audit(small_corpus):
    cfg = SpectrumConfig(max_attempts=50, seed=2)
    for entry in small_corpus:
        pairs = rewire_spectrum(entry.graph, cfg, entry.id)
        swapped = [pair.swapped_edges for pair in pairs]
        assert swapped == sorted(swapped)
        for pair in pairs:
            assert audit_pair(pair) == []
            assert pair.infeasible or pair.swapped_edges >= pair.level * pair.total_edges


def test_audit_pair_reports_tampering(talk_graph):
    pair = rewire_spectrum(talk_graph, SpectrumConfig(levels=(0.0,)))[0]
    broken = RewiredPair(id=pair.id, original=pair.original, rewired=parse_penman("(a / amr-empty)"),
                         total_edges=pair.total_edges, swapped_edges=pair.swapped_edges)
    assert audit_pair(broken)


@pytest.mark.parametrize("count, expected", [
    (59255, (47404, 5925, 5926)),
    (100, (80, 10, 10)),
    (3, (2, 0, 1)),
])
def test_split_sizes(count, expected):
    assert split_sizes(count, (0.8, 0.1, 0.1)) == expected


def test_split_sizes_must_sum_to_one():
    with pytest.raises(ValueError):
        split_sizes(10, (0.5, 0.2, 0.2))


def test_empty_corpus_is_refused():
    with pytest.raises(EmptyCorpus):
        build_dataset([], SpectrumConfig(), show_progress=False)


def test_build_dataset(tmp_path, small_corpus):
    cfg = SpectrumConfig(levels=(0.0, 0.5, 1.0), max_attempts=50, seed=7)
    out_dir = str(tmp_path / "rare")
    dataset = build_dataset(small_corpus, cfg, out_dir=out_dir, show_progress=False)

    sources = {name: {pair.source_id for pair in pairs} for name, pairs in dataset.items()}
    assert not sources["train"] & sources["dev"]
    assert not sources["train"] & sources["test"]
    assert not sources["dev"] & sources["test"]

    with open(os.path.join(out_dir, "stats.json"), encoding="utf-8") as f:
        stats = json.load(f)
    assert [stats[name]["graphs"] for name in ("train", "dev", "test")] == [32, 4, 4]
    for name, pairs in dataset.items():
        assert stats[name]["pairs"] == len(pairs)
        assert os.path.exists(os.path.join(out_dir, f"{name}.jsonl"))

    again = build_dataset(small_corpus, cfg, show_progress=False)
    for name in dataset:
        assert [p.to_record() for p in dataset[name]] == [p.to_record() for p in again[name]]


@pytest.mark.slow
def test_build_dataset_independent_of_workers(small_corpus):
    cfg = SpectrumConfig(levels=(0.25, 0.75), max_attempts=50, seed=3)
    serial = build_dataset(small_corpus, cfg, jobs=1, show_progress=False)
    parallel = build_dataset(small_corpus, cfg, jobs=2, show_progress=False)
    for name in serial:
        assert [p.to_record() for p in serial[name]] == [p.to_record() for p in parallel[name]]


def test_pairs_survive_jsonl(tmp_path, talk_graph):
    pairs = rewire_spectrum(talk_graph, SpectrumConfig(levels=(0.0, 0.5), seed=4), entry_id="talk")
    path = str(tmp_path / "pairs.jsonl")
    write_pairs(pairs, path)
    loaded = read_dataset(path)
    assert [pair.gold for pair in loaded] == [pair.gold for pair in pairs]
    assert [pair.to_record() for pair in loaded] == [pair.to_record() for pair in pairs]


@pytest.mark.slow
def test_large_graph_rewires_soundly():
    g = random_graph(random.Random(1), 1000)
    pairs = rewire_spectrum(g, SpectrumConfig(seed=1))
    assert len(pairs) == 9
    for pair in pairs:
        assert audit_pair(pair) == []
    assert pairs[4].swapped_edges >= g.edge_count / 2


def test_malformed_dataset_record(tmp_path, talk_graph):
    record = rewire_spectrum(talk_graph, SpectrumConfig(levels=(0.0,)))[0].to_record()
    record["total_edges"] = "many"
    path = tmp_path / "broken.jsonl"
    path.write_text(json.dumps(record) + "\n", encoding="utf-8")
    with pytest.raises(MalformedRecord) as info:
        read_dataset(str(path))
    assert info.value.line == 1
