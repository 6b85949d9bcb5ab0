#!/usr/bin/env python3
"""
Tests for the smatch alignment search against a brute-force optimum
"""

import itertools
import random
from fractions import Fraction

import pytest

from amr_rematch.amr_core import graph_size
from amr_rematch.smatch import AlignmentProblem, align, smatch_alignment, triple_count
from amr_rematch.synthetic import random_graph


def _matched(g1, g2, mapping):
    matched = sum(1 for a, b in mapping.items() if g1.instances[a] == g2.instances[b])
    attributes2 = set(g2.attributes)
    matched += sum(1 for s, label, c in g1.attributes if s in mapping and (mapping[s], label, c) in attributes2)
    relations2 = set(g2.relations)
    matched += sum(1 for s, role, t in g1.relations
                   if s in mapping and t in mapping and (mapping[s], role, mapping[t]) in relations2)
    if mapping.get(g1.root) == g2.root and g1.instances[g1.root] == g2.instances[g2.root]:
        matched += 1
    return matched


def brute_force_f1(g1, g2):
    nodes1, nodes2 = list(g1.instances), list(g2.instances)
    best = 0
    if len(nodes1) <= len(nodes2):
        for perm in itertools.permutations(nodes2, len(nodes1)):
            best = max(best, _matched(g1, g2, dict(zip(nodes1, perm))))
    else:
        for perm in itertools.permutations(nodes1, len(nodes2)):
            best = max(best, _matched(g1, g2, dict(zip(perm, nodes2))))
    return Fraction(2 * best, triple_count(g1) + triple_count(g2))


def _related_pairs(count):
    # Same seed, different sizes: the two graphs share a prefix of random choices
    for seed in range(count):
        rng = random.Random(seed)
        size1, size2 = rng.randint(2, 11), rng.randint(2, 11)
        yield random_graph(random.Random(seed), size1), random_graph(random.Random(seed), size2)


def test_triple_count(talk_graph):
    assert triple_count(talk_graph) == graph_size(talk_graph) + 1 == 15


def test_exhaustive_matches_brute_force():
    for g1, g2 in _related_pairs(40):
        assert align(g1, g2).score == brute_force_f1(g1, g2)


def test_hill_climbing_never_exceeds_optimum():
    for g1, g2 in _related_pairs(40):
        state, _ = smatch_alignment(g1, g2, restarts=8, seed=3, exact_limit=0)
        assert state.score <= brute_force_f1(g1, g2)
        assert 0 <= state.score <= 1


def test_hill_climbing_finds_identity(small_graphs):
    for g in small_graphs:
        state = align(g, g, restarts=1, exact_limit=0)
        assert state.score == 1
        assert state.mapping == {node: node for node in g.instances}


def test_alignment_is_injective():
    for g1, g2 in _related_pairs(20):
        state = align(g1, g2, restarts=4, exact_limit=0)
        assert len(set(state.mapping.values())) == len(state.mapping)


def test_alignment_is_seed_deterministic(small_graphs):
    g1, g2 = small_graphs[-1], small_graphs[-2]
    first = align(g1, g2, restarts=5, seed=9, exact_limit=0)
    second = align(g1, g2, restarts=5, seed=9, exact_limit=0)
    assert first == second


def test_alignment_count(cut_graph, talk_graph):
    assert AlignmentProblem(cut_graph, talk_graph).alignment_count() == 6 * 5 * 4 * 3
    assert AlignmentProblem(talk_graph, cut_graph).alignment_count() == 6 * 5 * 4 * 3


def test_restarts_must_be_positive(cut_graph):
    with pytest.raises(ValueError):
        align(cut_graph, cut_graph, restarts=0)


@pytest.mark.slow
def test_hill_climbing_reaches_optimum_on_small_graphs():
    for g1, g2 in _related_pairs(200):
        state, _ = smatch_alignment(g1, g2, restarts=8, seed=3, exact_limit=0)
        assert state.score == brute_force_f1(g1, g2)
