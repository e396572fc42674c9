"""Transversal and isolated copy counts, G^S, and the edge-family relation."""

import numpy as np
import pytest

from antiramsey.census import (
    _local_embeds,
    edge_family_embeds,
    estimate_embed_probability,
    isolated_copies,
    isolated_subgraph,
    transversal_counts,
    wilson_interval,
)
from antiramsey.graphs import Graph, disjoint_union, make_book, make_clique, make_path
from antiramsey.random_models import PartitionLayout, sample_gnp
from oracles import brute_census, random_graph


def test_book_has_no_isolated_triangles():
    g = make_book(2)
    assert isolated_copies(g, make_clique(3)) == []
    tc = transversal_counts(g, make_clique(3), [[0], [1], [2, 3]])
    assert (tc.z, tc.y) == (2, 0)


def test_disjoint_triangles_all_isolated():
    g = disjoint_union(make_clique(3), make_clique(3))
    iso = isolated_subgraph(g, make_clique(3))
    assert len(iso.copies) == 2 and iso.graph == g
    assert iso.copy_of(0, 1) != iso.copy_of(3, 4)


def test_census_matches_oracle():
    rng = np.random.default_rng(12)
    s = make_clique(3)
    for _ in range(12):
        n = int(rng.integers(4, 9))
        g = random_graph(rng, n, 0.45)
        parts = PartitionLayout.equitable(n, ["a", "b", "c"]).parts
        z, y, gs = brute_census(g, s, parts)
        tc = transversal_counts(g, s, parts)
        assert (tc.z, tc.y) == (z, y)
        assert set(isolated_subgraph(g, s).graph.edges) == gs


def test_labeled_counts_are_at_most_unlabeled():
    g = sample_gnp(30, 0.3, 4).graph
    lay = PartitionLayout.equitable(30, ["1", "2", "3"])
    a = transversal_counts(g, make_clique(3), lay)
    b = transversal_counts(g, make_path(3), lay, labeled=True)
    c = transversal_counts(g, make_path(3), lay)
    assert a.y <= a.z
    assert b.z <= c.z


def test_parts_validation():
    with pytest.raises(ValueError):
        transversal_counts(make_clique(4), make_clique(3), [[0, 1], [1], [2]])
    with pytest.raises(ValueError):
        transversal_counts(make_clique(4), make_clique(3), [[0], [1]])


def test_edge_family_relation():
    g = disjoint_union(make_clique(3), make_clique(3))
    s = make_clique(3)
    assert edge_family_embeds(g, s, [(0, 1), (3, 4)])
    assert not edge_family_embeds(g, s, [(0, 1), (1, 2)])
    assert not edge_family_embeds(make_book(2), s, [(0, 1)])
    with pytest.raises(ValueError):
        edge_family_embeds(g, s, [])


def test_local_check_agrees_with_global():
    rng = np.random.default_rng(1)
    s = make_clique(3)
    for _ in range(30):
        g = random_graph(rng, 12, 0.3)
        for es in ([(0, 1)], [(0, 1), (2, 3)], [(0, 1), (1, 2)]):
            want = all(g.has_edge(*e) for e in es) and edge_family_embeds(g, s, es)
            assert _local_embeds(g, s, set(es)) == want


def test_wilson_interval_contains_estimate():
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 50)[0] == 0.0


def test_embed_estimate_reproducible():
    a = estimate_embed_probability(20, 0.2, make_clique(3), [(0, 1)], 300, seed=3)
    b = estimate_embed_probability(20, 0.2, make_clique(3), [(0, 1)], 300, seed=3)
    assert a == b
    assert a.q == pytest.approx(20 * 0.2 ** 3)
