from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from downset_rays.errors import InputError
from downset_rays.graphs import (
    GraphModel,
    bell_pair,
    even_degree_check,
    format_graph,
    graph_entropy,
    parse_graph,
    star_graph,
)
from downset_rays.oracle import brute_force_graph_entropy, random_graph
from downset_rays.sac import PartySystem, sa_check, ssa_check


def test_bell_pair():
    assert graph_entropy(bell_pair()) == (1, 1, 0)


def test_star_and_its_scaling():
    v = graph_entropy(star_graph(3))
    assert PartySystem(3).to_presentation(v) == [1, 1, 1, 2, 2, 2, 1]
    assert graph_entropy(star_graph(3).scaled(Fraction(3, 2))) == tuple(Fraction(3, 2) * x for x in v)


def test_weighted_star_min_cut():
    # cutting the heavy leaf off costs more than cutting the two light ones
    v = graph_entropy(star_graph(2, {0: 1, 1: 5, 2: 1}))
    assert v == (2, 1, 1)


def test_validation():
    with pytest.raises(InputError):
        GraphModel(2, {"a": 1, "b": 7}, [("a", "b", 1)]).validate()
    with pytest.raises(InputError):
        GraphModel(2, {"a": 1, "b": 2}, [("a", "b", -1)]).validate()
    with pytest.raises(InputError):
        GraphModel(2, {"a": 1, "b": 2, "c": None}, [("a", "b", 1)]).validate()
    with pytest.raises(InputError):
        GraphModel(2, {"a": None}, []).validate()


def test_even_degree():
    assert not even_degree_check(star_graph(3))
    assert even_degree_check(star_graph(2, {0: 2, 1: 2, 2: 2}))
    with pytest.raises(InputError):
        even_degree_check(star_graph(2, {0: Fraction(1, 2)}))


def test_graph_text_round_trip():
    g = star_graph(3, {1: 2})
    h = parse_graph(format_graph(g))
    assert graph_entropy(h) == graph_entropy(g)
    with pytest.raises(InputError):
        parse_graph("a 1\nb 2\na b x\n")


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_min_cuts_match_exhaustive_assignment(n, seed):
    g = random_graph(n, seed)
    assert graph_entropy(g) == brute_force_graph_entropy(g)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_graph_vectors_are_subadditive(n, seed):
    g = random_graph(n, seed, bulk=4, extra_edges=4)
    v = graph_entropy(g)
    ps = PartySystem(n)
    assert sa_check(ps, v)[0]
    assert ssa_check(ps, v)[0]
