"""Samplers, coupling, partitions, colorings and color-class splits."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from antiramsey.graphs import make_clique
from antiramsey.rainbow import is_proper
from antiramsey.random_models import (
    PartitionLayout,
    _pairs_from_index,
    assign_colors,
    class_edge_ids,
    color_class_subgraph,
    coupled_gnp_marks,
    graph_at,
    greedy_coloring,
    proper_color,
    sample_gnp,
    sample_gnp_graph,
    sample_two_layer,
    trial_rng,
)


@pytest.mark.parametrize("n", [2, 3, 7, 50, 2001])
def test_pair_index_inverse(n):
    total = n * (n - 1) // 2
    k = np.arange(total) if total < 10**5 else np.random.default_rng(0).integers(0, total, 10**5)
    i, j = _pairs_from_index(n, k)
    assert np.all(i < j) and np.all(j < n)
    assert np.array_equal(i * n - i * (i + 1) // 2 + (j - i - 1), k)


def test_gnp_edge_count_is_binomial():
    n, p = 200, 0.1
    counts = [sample_gnp_graph(n, p, trial_rng(4, t)).e for t in range(40)]
    mean = n * (n - 1) / 2 * p
    sd = np.sqrt(mean * (1 - p))
    assert abs(np.mean(counts) - mean) < 4 * sd / np.sqrt(40)


def test_gnp_extremes_and_reproducibility():
    assert sample_gnp(10, 0.0, 1).graph.e == 0
    assert sample_gnp(10, 1.0, 1).graph == make_clique(10)
    assert sample_gnp(40, 0.3, 9).graph == sample_gnp(40, 0.3, 9).graph
    with pytest.raises(ValueError):
        sample_gnp(10, 1.5, 0)


@given(st.integers(0, 2**31), st.lists(st.floats(0, 1), min_size=2, max_size=6))
@settings(max_examples=40, deadline=None)
def test_coupled_samples_are_nested(seed, ps):
    ps = sorted(ps)
    n = 30
    p_max = max(ps[-1], 1e-9)
    pairs, marks = coupled_gnp_marks(n, p_max, trial_rng(seed))
    prev = set()
    for p in ps:
        cur = set(graph_at(n, pairs, marks, p, p_max).edges)
        assert prev <= cur
        prev = cur


def test_layout_is_equitable_and_disjoint():
    lay = PartitionLayout.for_pipeline(23, 4, 5)
    assert lay.roles == ("V1", "V2", "V3", "V4", "U3", "U4", "U5")
    sizes = [len(p) for p in lay.parts]
    assert max(sizes) - min(sizes) <= 1 and sum(sizes) == 23
    assert sorted(x for p in lay.parts for x in p) == list(range(23))
    with pytest.raises(ValueError):
        PartitionLayout(((0, 1), (1, 2)), ("a", "b"))


def test_two_layer_respects_roles():
    n = 60
    lay = PartitionLayout.for_pipeline(n, 3, 5)
    g = sample_two_layer(n, 0.5, 0.0, lay, seed=3).graph
    inside = set().union(*(set(lay.part(f"V{i}")) for i in (1, 2, 3)))
    assert g.e > 0 and all(u in inside and v in inside for u, v in g.edges)
    g2 = sample_two_layer(n, 0.5, 0.2, lay, seed=3).graph
    assert set(g.edges) <= set(g2.edges) or any(u not in inside for u, _ in g2.edges)
    with pytest.raises(ValueError):
        sample_two_layer(n, 0.1, 0.2, lay, seed=0)


@pytest.mark.parametrize("strategy", ["greedy", "distinct", "random-greedy"])
def test_colorings_proper_and_bounded(strategy):
    g = sample_gnp(80, 0.2, 5).graph
    c = proper_color(g, strategy, seed=2)
    assert is_proper(g, c.colors)
    if strategy != "distinct":
        assert c.num_colors <= 2 * g.max_degree - 1
    else:
        assert c.num_colors == g.e


def test_greedy_uses_smallest_free_color():
    assert greedy_coloring(make_clique(3)) == [0, 1, 2]


def test_class_split_partitions_edges():
    g = sample_gnp(100, 0.1, 7).graph
    c = proper_color(g, "greedy")
    sigma = assign_colors(c, 4, seed=1)
    ids = class_edge_ids(c, sigma)
    allids = np.sort(np.concatenate(ids))
    assert np.array_equal(allids, np.arange(g.e))
    subs = [color_class_subgraph(g, c, sigma, t) for t in range(4)]
    assert sum(s.e for s in subs) == g.e
    # every color lands in exactly one class
    for t, s in enumerate(subs):
        cols = {c.color(u, v) for u, v in s.edges}
        assert all(sigma.sigma[x] == t for x in cols)


def test_class_labels_from_edges():
    g = sample_gnp(40, 0.3, 1).graph
    c = proper_color(g, "greedy")
    labels = [(0, 1), (1, 2), (2, 0)]
    sigma = assign_colors(c, labels, seed=5)
    assert sigma.class_count == 3 and sigma.class_of((1, 2)) == 1
    assert np.array_equal(sigma.sigma, assign_colors(c, labels, seed=5).sigma)
