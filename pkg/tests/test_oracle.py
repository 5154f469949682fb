import pytest

from downset_rays.errors import GuardError
from downset_rays.oracle import (
    RandomInstanceSpec,
    brute_force_ders,
    dd_filter_pipeline,
    random_instance,
    verify_group,
)
from downset_rays.polycone import InequalitySystem
from downset_rays.poset import Poset
from downset_rays.sac import PartySystem

from conftest import sac_run, square_cone

# frozen from dd_filter_pipeline before the engine was compared against it
N4_ORBIT_SIZES = [5]


def test_square_cone():
    sys, poset = square_cone()
    assert {r.zero_set for r in brute_force_ders(sys, poset)} == {
        frozenset({1, 2}),
        frozenset({2, 3}),
        frozenset({0, 3}),
    }
    # without the order the missing ray comes back
    assert len(brute_force_ders(sys, Poset.antichain(4))) == 4


def test_orthant_axes():
    sys = InequalitySystem(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert [r.generator for r in brute_force_ders(sys, Poset.antichain(3))] == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_guard():
    sys, poset = square_cone()
    with pytest.raises(GuardError):
        brute_force_ders(sys, poset, guard=3)
    with pytest.raises(GuardError):
        dd_filter_pipeline(PartySystem(5), max_parties=4)


def test_pipeline_three_parties():
    (orb,) = dd_filter_pipeline(PartySystem(3))
    assert PartySystem(3).to_presentation(orb.generator) == [1, 1, 1, 2, 2, 2, 1]
    assert orb.orbit_size == 1 and orb.ssa_ok


def test_pipeline_four_parties_matches_engine():
    orbits = dd_filter_pipeline(PartySystem(4))
    assert [o.orbit_size for o in orbits] == N4_ORBIT_SIZES
    assert {o.canonical for o in orbits} == sac_run(4).orbit_keys()


@pytest.mark.slow
def test_pipeline_five_parties_matches_engine():
    orbits = dd_filter_pipeline(PartySystem(5))
    assert sorted(o.orbit_size for o in orbits) == [1, 6, 10, 15, 60, 90]
    assert {o.canonical for o in orbits} == sac_run(5).orbit_keys()


@pytest.mark.parametrize("choice", ["trivial", "cyclic", "swap"])
def test_catalog_groups_preserve_closed_sets(choice):
    for seed in range(10):
        inst = random_instance(RandomInstanceSpec(ambient_dim=3, inequality_count=6, group_choice=choice, seed=seed))
        assert verify_group(inst)


def test_density_extremes():
    anti = random_instance(RandomInstanceSpec(ambient_dim=3, inequality_count=6, poset_density=0.0, seed=1))
    assert anti.poset == Poset.antichain(6)
    chain = random_instance(RandomInstanceSpec(ambient_dim=3, inequality_count=6, poset_density=1.0, seed=1))
    assert len(chain.poset.covers) == 5
    assert len(chain.poset.maximal_of(range(6))) == 1


def test_redundant_faces_sit_on_top():
    inst = random_instance(RandomInstanceSpec(ambient_dim=3, inequality_count=5, seed=4, redundant_faces=2))
    assert inst.system.size == 7
    assert inst.system.redundant[-2:] == (True, True)
    assert inst.poset.is_up_set({5, 6})
