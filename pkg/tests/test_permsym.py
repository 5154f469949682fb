import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from downset_rays.errors import GuardError
from downset_rays.permsym import (
    PermGroup,
    Permutation,
    canonical_set,
    canonical_with_element,
    is_invariant,
    orbit_completion,
    partition_into_orbits,
    set_orbit_size,
    set_stabilizer,
)


@st.composite
def groups(draw, max_degree=6):
    k = draw(st.integers(1, max_degree))
    gens = draw(st.lists(st.permutations(list(range(k))), max_size=2))
    return PermGroup(k, [Permutation(tuple(g)) for g in gens])


def test_symmetric_group_orders():
    s4 = PermGroup(4, [Permutation((1, 0, 2, 3)), Permutation((1, 2, 3, 0))])
    assert s4.order == 24
    assert set_stabilizer(s4, {0}).order == 6
    assert set_orbit_size(s4, {0, 1}) == 6
    assert canonical_set(s4, {2, 3}) == (0, 1)


def test_cycles_and_products():
    p = Permutation.from_cycles(4, [(0, 1, 2)])
    assert p.images == (1, 2, 0, 3)
    assert (p * p.inverse()).is_identity()
    assert p.apply({0, 3}) == {1, 3}


def test_group_bound_aborts():
    gens = [Permutation((1, 0, 2, 3, 4, 5, 6, 7)), Permutation((1, 2, 3, 4, 5, 6, 7, 0))]
    with pytest.raises(GuardError):
        PermGroup(8, gens, bound=1000)


def test_partition_requires_invariance():
    g = PermGroup(3, [Permutation((1, 0, 2))])
    assert partition_into_orbits(g, {0, 1, 2}) == [frozenset({0, 1}), frozenset({2})]
    with pytest.raises(ValueError):
        partition_into_orbits(g, {0})


@settings(max_examples=200, deadline=None)
@given(groups(), st.data())
def test_orbit_stabilizer_product(g, data):
    x = frozenset(data.draw(st.lists(st.integers(0, g.degree - 1), max_size=g.degree)))
    images = {frozenset(int(v) for v in row[sorted(x)]) for row in g.elements} if x else {frozenset()}
    assert len(images) * set_stabilizer(g, x).order == g.order
    assert set_orbit_size(g, x) == len(images)


@settings(max_examples=200, deadline=None)
@given(groups(), st.data())
def test_canonical_form_is_an_orbit_invariant(g, data):
    x = frozenset(data.draw(st.lists(st.integers(0, g.degree - 1), max_size=g.degree)))
    key, t = canonical_with_element(g, x)
    assert key == canonical_set(g, x)
    if x:
        assert tuple(sorted(int(v) for v in g.elements[t][sorted(x)])) == key
    for h in g:
        assert canonical_set(g, h.apply(x)) == key


@settings(max_examples=200, deadline=None)
@given(groups(), st.data())
def test_orbit_completion_is_invariant(g, data):
    x = frozenset(data.draw(st.lists(st.integers(0, g.degree - 1), max_size=g.degree)))
    c = orbit_completion(g, x)
    assert x <= c
    assert is_invariant(g, c)
    parts = partition_into_orbits(g, c)
    assert frozenset().union(*parts) == c if parts else not c
    stab = set_stabilizer(g, x)
    assert np.all(np.isin(stab.root_index, np.arange(g.order)))
    for h in stab:
        assert h.apply(x) == x
