import json

import pytest

from downset_rays.engine import (
    Engine,
    EngineConfig,
    Triplet,
    algorithm5_update,
    check_conditions,
    cl_FD,
    cl_LD,
    initial_triplet,
    post_process,
    run,
    simplicial_check,
)
from downset_rays.errors import InputError
from downset_rays.permsym import PermGroup, set_stabilizer
from downset_rays.poset import Poset
from downset_rays.polycone import InequalitySystem

from conftest import sac, sac_run, square_cone


def _square_run(**cfg):
    sys, poset = square_cone()
    g = PermGroup.trivial(4)
    return run(initial_triplet(g, (), ()), sys, poset, EngineConfig(**cfg), g)


def test_square_cone_drops_the_ray_that_is_not_a_down_set():
    res = _square_run()
    zero_sets = {r.down_set for r in res.rays}
    assert zero_sets == {frozenset({1, 2}), frozenset({2, 3}), frozenset({0, 3})}
    assert {r.ray.generator for r in res.rays} == {(1, -1, 1), (-1, 1, 1), (-1, -1, 1)}


def test_square_cone_closures():
    sys, poset = square_cone()
    # adding E1 drags E2 in, and the two span a line
    assert cl_LD(sys, poset, {1}) == {1, 2}
    assert cl_FD(sys, poset, {1}) == {1, 2}
    # E0 = E2 = 0 is a line that meets the cone only at the apex
    assert cl_LD(sys, poset, {0, 2}) == {0, 2}
    assert cl_FD(sys, poset, {0, 2}) == {0, 1, 2, 3}


def test_config_validation():
    with pytest.raises(InputError):
        EngineConfig(closure_variant="XY")
    with pytest.raises(InputError):
        EngineConfig(order="nonsense")
    echo = EngineConfig(stop_excluded_frac="9/10").echo()
    assert echo["stop_excluded_frac"] == "9/10"
    json.dumps(echo)


def test_initial_triplet_conditions_n5():
    b = sac(5)
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    c = check_conditions(init, b.system, b.poset)
    assert c == {"disjoint": True, "dim_gt_1": True, "invariant": True, "deficit": 0, "deficit_zero": True}
    assert init.stabilizer.order == 720


def test_algorithm5_update_extends_only_invariantly():
    b = sac(4)
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    upd = algorithm5_update(init, b.system, b.poset)
    assert upd.excluded >= init.excluded
    assert not (upd.excluded & upd.down_set)
    assert check_conditions(upd, b.system, b.poset)["invariant"]


def test_orders_and_closures_agree_n4():
    want = sac_run(4).orbit_keys()
    for cfg in ({"order": "discovery"}, {"order": "size"}, {"closure_variant": "FD"}, {"stabilizer_scope": "parent"}):
        assert sac_run(4, **cfg).orbit_keys() == want, cfg


def test_simplicial_shortcut_off_gives_the_same_orbits():
    assert sac_run(5, simplicial_shortcut=False).orbit_keys() == sac_run(5).orbit_keys()


def test_residual_update_off_gives_the_same_orbits():
    assert sac_run(5, update_residual=False).orbit_keys() == sac_run(5).orbit_keys()


def test_stop_dim_then_post_process_recovers_everything():
    b = sac(5)
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    early = run(init, b.system, b.poset, EngineConfig(stop_dim=10), b.group)
    assert early.open_triplets
    found = list(early.found)
    for t in early.open_triplets:
        found.extend(post_process(t, b.system, b.poset, b.group))
    eng = Engine(b.system, b.poset, b.group)
    assert {r.canonical for r in eng.finalize(found)} == sac_run(5).orbit_keys()


def test_excluded_fraction_stop():
    b = sac(5)
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    res = run(init, b.system, b.poset, EngineConfig(stop_excluded_frac="1/3"), b.group)
    # 121 of 301 instances are excluded from the start
    assert res.stats["iterations"] == 0
    assert res.open_triplets == [init]


def test_checkpoint_resume_matches_uninterrupted(tmp_path):
    b = sac(5)
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    ck = tmp_path / "ck.json"
    run(init, b.system, b.poset, EngineConfig(), b.group, checkpoint=ck, max_generations=2)
    resumed = run(init, b.system, b.poset, EngineConfig(), b.group, checkpoint=ck, resume=True)
    full = sac_run(5)
    assert [r.canonical for r in resumed.rays] == [r.canonical for r in full.rays]
    assert [(b.parent, b.rows) for b in resumed.trace] == [(b.parent, b.rows) for b in full.trace]


def test_worker_processes_give_identical_output():
    b = sac(4)
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    par = run(init, b.system, b.poset, EngineConfig(jobs=2), b.group)
    seq = sac_run(4)
    assert [r.ray for r in par.rays] == [r.ray for r in seq.rays]
    assert [(x.parent, x.rows) for x in par.trace] == [(x.parent, x.rows) for x in seq.trace]


def test_dedup_queue_keeps_the_orbits():
    assert sac_run(5, dedup_queue=True).orbit_keys() == sac_run(5).orbit_keys()


def test_simplicial_check_on_an_orthant():
    sys = InequalitySystem(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    t = Triplet(frozenset(), frozenset(), PermGroup.trivial(3))
    rays = simplicial_check(t, sys, Poset.antichain(3))
    assert sorted(r.vector for r in rays) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_degenerate_initial_triplet():
    sys, poset = square_cone()
    g = PermGroup.trivial(4)
    res = run(Triplet(frozenset({2}), frozenset({2}), g), sys, poset, EngineConfig(), g)
    assert res.rays == []
    assert "degenerate" in res.stats


def test_child_stabilizers_fix_their_down_sets():
    b = sac(5)
    res = sac_run(5)
    assert res.stats["iterations"] == 8
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    eng = Engine(b.system, b.poset, b.group)
    kids, _, _ = eng.main_subroutine(init)
    for k in kids:
        assert k.stabilizer.order == set_stabilizer(b.group, k.down_set).order
