from fractions import Fraction

import pytest

from downset_rays.errors import InputError
from downset_rays.sac import (
    MIInstance,
    PartySystem,
    build_mi_poset,
    enumerate_mi_instances,
    evaluate_inequalities,
    facet_count,
    format_entropy_vector,
    fstar_dim,
    mi_dual_vector,
    parse_entropy_vector,
    party_group,
    sa_check,
    ssa_check,
    stirling2_3,
)

from conftest import sac


def test_coordinates_and_purification():
    ps = PartySystem(3)
    assert ps.coord({1}) == 0 and ps.coord({1, 2, 3}) == 6
    assert ps.subset(4) == {1, 3}
    assert ps.term({0}) == ps.coord({1, 2, 3})
    assert ps.term({0, 1}) == ps.coord({2, 3})
    assert ps.term({0, 1, 2, 3}) is None


def test_instance_notation():
    m = MIInstance.parse("I(1:20)")
    assert str(m) == "I(1:20)"
    assert MIInstance.make({2, 0}, {1}) == m
    assert m.size == 3


def test_dual_vector_of_a_purified_instance():
    ps = PartySystem(2)
    # I(1:0) = S_1 + S_0 - S_10 = S_1 + S_12 - S_2
    v = mi_dual_vector(ps, MIInstance.parse("I(1:0)"))
    assert v == (1, -1, 1)


@pytest.mark.parametrize("n,count", [(2, 6), (3, 25), (4, 90), (5, 301), (6, 966)])
def test_instance_count(n, count):
    assert stirling2_3(n + 2) == count
    if n <= 5:
        assert len(enumerate_mi_instances(PartySystem(n))) == count


def test_poset_orders_by_inclusion():
    ps = PartySystem(3)
    inst = enumerate_mi_instances(ps)
    p = build_mi_poset(ps, inst)
    where = {m: i for i, m in enumerate(inst)}
    a, b = where[MIInstance.parse("I(1:2)")], where[MIInstance.parse("I(1:23)")]
    assert p.less(a, b)
    assert not p.leq(b, a)


def test_party_group_acts_on_instances_and_vectors():
    ps = PartySystem(3)
    act = party_group(ps)
    assert act.group.order == 24
    b = sac(3)
    v = (1, 1, 2, 1, 2, 2, 1)
    for t in range(act.group.order):
        w = act.act_on_vector(t, v)
        vals = b.system.values(v)
        wv = b.system.values(w)
        assert [vals[i] for i in range(len(vals))] == [wv[int(act.group.elements[t][i])] for i in range(len(vals))]


def test_counts_formulas():
    assert [facet_count(PartySystem(n)) for n in (5, 6)] == [270, 903]
    assert [fstar_dim(PartySystem(n)) for n in (3, 5, 6)] == [1, 16, 42]


def test_checks_with_rationals():
    ps = PartySystem(2)
    assert sa_check(ps, (1, 1, 0)) == (True, 0)
    assert sa_check(ps, (Fraction(1, 2), 0, 1)) == (False, 1)
    with pytest.raises(InputError):
        ssa_check(ps, (1, 1))


def test_vector_text_round_trip():
    ps = PartySystem(3)
    text = "1 1 1; 2 2 2; 1"
    ps2, v = parse_entropy_vector(text)
    assert ps2 == ps
    assert format_entropy_vector(ps, v) == text
    with pytest.raises(InputError):
        parse_entropy_vector("1 2 3 4")


def test_inequality_report():
    r = evaluate_inequalities([(1, 0), (0, 1), (-1, 1)], (1, 0), ["a", "a", "b"])
    assert (r.saturated, r.violated) == (1, 1)
    assert r.by_tag == {"a": (1, 0), "b": (0, 1)}
    assert not r.ok


def test_genuine_setup_n3():
    b = sac(3)
    assert len(b.initial_down) == 6
    assert sum(b.system.redundant) == 7
    assert b.poset.is_down_set(b.initial_down)
    assert b.poset.is_up_set(b.initial_excluded)
