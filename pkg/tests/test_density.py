"""m2-density, beta, and the hypothesis checks."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from antiramsey.density import (
    beta,
    check_corollary_gap,
    check_theorem_hypotheses,
    is_two_balanced,
    m2_density,
)
from antiramsey.graphs import Graph, LabeledTwoGraph, disjoint_union, make_book, make_clique, make_cycle, make_path
from oracles import m2_by_edge_subsets, random_graph
from test_graphs import small_graphs


def test_known_values():
    assert m2_density(make_clique(3)).value == 2
    assert m2_density(make_clique(5)).value == 3
    assert m2_density(make_cycle(5)).value == Fraction(4, 3)
    assert m2_density(make_cycle(6)).value == Fraction(5, 4)
    assert m2_density(make_path(4)).value == 1


def test_book_witness_is_triangle():
    rep = m2_density(make_book(3))
    assert rep.value == 2
    assert rep.witness == make_clique(3)
    assert rep.two_balanced


def test_disconnected_witness():
    g = disjoint_union(make_clique(4), make_cycle(5))
    rep = m2_density(g)
    assert rep.value == Fraction(5, 2)
    assert rep.witness == make_clique(4)
    assert not rep.two_balanced


def test_beta_values():
    assert beta(make_cycle(6), make_book(4)) == Fraction(8, 15)
    assert beta(make_cycle(5), make_book(1)) == Fraction(1 + Fraction(3, 4), 3)


def test_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        m2_density(Graph(2, [(0, 1)]))
    with pytest.raises(ValueError):
        m2_density(Graph(4))


@given(small_graphs(max_n=7).filter(lambda g: g.n >= 3 and g.e >= 1))
@settings(max_examples=80, deadline=None)
def test_m2_matches_edge_subset_oracle(g):
    assert m2_density(g).value == m2_by_edge_subsets(g)


@given(small_graphs(max_n=7).filter(lambda g: g.n >= 3 and g.e >= 1))
@settings(max_examples=60, deadline=None)
def test_witness_attains_value_and_balance_flag(g):
    rep = m2_density(g)
    w = rep.witness
    assert w.n >= 3
    assert Fraction(w.e - 1, w.n - 2) == rep.value
    assert rep.two_balanced == (Fraction(g.e - 1, g.n - 2) == rep.value)
    assert is_two_balanced(g) == rep.two_balanced


@given(small_graphs(max_n=6).filter(lambda g: g.n >= 3 and g.e >= 1))
@settings(max_examples=40, deadline=None)
def test_m2_monotone_under_edge_addition(g):
    missing = [(i, j) for i in range(g.n) for j in range(i + 1, g.n) if not g.has_edge(i, j)]
    if missing:
        bigger = Graph(g.n, list(g.edges) + [missing[0]])
        assert m2_density(bigger).value >= m2_density(g).value


def test_hypotheses_for_book_and_cycle():
    f = LabeledTwoGraph(make_book(2))
    h = LabeledTwoGraph(make_cycle(5))
    rep = check_theorem_hypotheses(f, h, make_book(4))
    assert rep.h_above_one and rep.h_below_f and rep.s_two_balanced
    assert rep.s_arrows_f == "holds"
    assert rep.all_hold
    skipped = check_theorem_hypotheses(f, h, make_book(4), arrows_budget=0)
    assert skipped.s_arrows_f == "skipped"
    assert not skipped.all_hold


def test_corollary_gap_requires_density_window():
    gap = check_corollary_gap(LabeledTwoGraph(make_cycle(6)), 2)
    assert gap.beta_above_half and gap.reciprocal_at_most_half
    with pytest.raises(ValueError):
        check_corollary_gap(LabeledTwoGraph(make_clique(3)), 1)
    with pytest.raises(ValueError):
        check_corollary_gap(LabeledTwoGraph(make_path(4)), 1)
