"""Acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
pass/fail line per criterion.  Every comparison below is exact (integers and
rationals), so no tolerances are involved; runtime limits are wall-clock
seconds measured with time.perf_counter.
"""

import json
import os
import random
import sys
import time
from pathlib import Path

import pytest

from downset_rays.engine import Engine, EngineConfig, initial_triplet, run
from downset_rays.graphs import bell_pair, graph_entropy, star_graph
from downset_rays.oracle import dd_filter_pipeline, random_graph
from downset_rays.permsym import partition_into_orbits, set_stabilizer
from downset_rays.polycone import satisfies_all
from downset_rays.poset import from_mask, to_mask
from downset_rays.sac import (
    PartySystem,
    build_sac_system,
    facet_count,
    format_entropy_vector,
    fstar_dim,
    parse_entropy_vector,
    sa_check,
    ssa_check,
    stirling2_3,
)

sys.path.insert(0, str(Path(__file__).parent))
import properties as P  # noqa: E402

N1_LIMIT_S = 1.0
N4_LIMIT_S = 60.0
N5_LIMIT_S = 600.0
PROPERTY_CASES = 200
GRAPH_CASES = 100

# N=5 trace: for each main-subroutine call, the parent's (|D|, dim, |U|, rank)
# and its children's cells with status letters (y open, b simplicial, g ray,
# r discarded)
REFERENCE_TRACE = {
    (15, 16, 121, 16): "34 11 175 11 y | 25 12 202 12 y | 15 16 226 15 g",
    (34, 11, 175, 11): "50 7 205 7 y | 41 8 225 8 y | 34 11 231 10 g",
    (25, 12, 202, 12): "59 3 242 0 r | 35 8 220 8 y | 35 9 234 8 g | 32 9 246 7 r | 32 9 248 7 r"
    " | 28 11 240 9 r | 25 12 258 6 r",
    (50, 7, 205, 7): "66 3 235 0 r | 63 4 218 4 b | 57 4 236 2 r | 54 5 239 4 g | 50 7 233 6 g",
    (41, 8, 225, 8): "66 2 235 0 r | 48 5 245 2 r | 48 5 237 3 r | 48 5 231 5 y | 48 6 241 4 r | 45 6 250 2 r"
    " | 45 6 249 3 r | 44 7 242 5 r | 44 7 245 4 r | 44 7 251 3 r | 44 7 257 1 r | 41 8 260 0 r",
    (35, 8, 220, 8): "45 4 226 3 g | 45 6 228 6 y | 39 6 254 4 r | 38 7 248 5 r | 38 7 257 2 r | 35 8 266 0 r",
    (48, 5, 231, 5): "55 4 232 4 b | 51 4 247 1 r | 51 4 250 0 r | 49 4 251 1 r | 48 5 253 0 r",
    (45, 6, 228, 6): "55 4 240 2 r | 48 5 243 4 g | 48 5 249 2 r | 46 5 254 1 r | 45 6 256 0 r",
}

N5_ORBIT_COUNT = 6
N5_SYMMETRIC_RAY = "1 1 1 1 1; 2 2 2 2 2 2 2 2 2 2; 3 3 3 3 3 3 3 3 3 3; 2 2 2 2 2; 1"

N6_ORBITS = 220
N6_SSA_VIOLATING = 12
N6_ORBIT_SIZE_RANGE = (7, 5040)

SA_VIOLATING_LINE = (
    "4, 2, 3, 2, 2, 3; 6, 7, 6, 6, 7, 5, 4, 4, 5, 5, 5, 6, 4, 5, 5; "
    "7, 8, 8, 9, 9, 9, 8, 8, 9, 9, 7, 7, 8, 6, 7, 5, 7, 8, 8, 7; "
    "9, 9, 8, 10, 7, 9, 9, 8, 6, 9, 9, 10, 8, 11, 10; 7, 6, 6, 7, 6, 8; 4"
)


def _parse_box(text):
    out = []
    for cell in text.split("|"):
        *nums, letter = cell.split()
        out.append((tuple(int(x) for x in nums), letter))
    return out


def _timed_run(n, **cfg):
    t0 = time.perf_counter()
    b = build_sac_system(PartySystem(n))
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    res = run(init, b.system, b.poset, EngineConfig(**cfg), b.group)
    return b, init, res, time.perf_counter() - t0


@pytest.mark.criterion(1, "N=3 genuine: one orbit (1,1,1,2,2,2,1) in under 1 s")
def test_criterion_1_three_parties():
    b, _, res, dt = _timed_run(3)
    assert len(res.rays) == 1
    assert b.ps.to_presentation(res.rays[0].ray.generator) == [1, 1, 1, 2, 2, 2, 1]
    assert dt < N1_LIMIT_S, f"{dt:.2f} s"


@pytest.mark.criterion(2, "instance, facet and F* dimension counts")
def test_criterion_2_counts():
    assert stirling2_3(5 + 2) == 301
    assert facet_count(PartySystem(5)) == 270
    assert facet_count(PartySystem(6)) == 903
    assert [fstar_dim(PartySystem(n)) for n in (3, 5, 6)] == [1, 16, 42]
    # the closed forms agree with the explicit enumeration where it is cheap
    for n in (2, 3, 4, 5):
        b = build_sac_system(PartySystem(n), "full")
        assert b.system.size == stirling2_3(n + 2)
        # the maximal instances, one per bipartition, are the non-facets
        assert sum(b.system.redundant) == 2**n - 1
        assert b.system.size - sum(b.system.redundant) == facet_count(b.ps)


@pytest.mark.criterion(3, "N=5 replay: first iteration, full trace, six orbits, under 10 min")
def test_criterion_3_five_party_replay():
    b, init, res, dt = _timed_run(5)
    eng = Engine(b.system, b.poset, b.group)
    assert eng.stats(to_mask(init.down_set), to_mask(init.excluded)) == (15, 16, 121, 16)

    # first iteration, before the excluded sets are extended
    d_mask, u_mask = to_mask(init.down_set), to_mask(init.excluded)
    top = eng.poset.maximal_mask(eng.all_mask & ~(d_mask | u_mask))
    firsts = []
    for orb in partition_into_orbits(init.stabilizer, from_mask(top)):
        dm, _, hit = eng.close(1 << min(orb), d_mask, avoid=u_mask)
        assert not hit
        firsts.append((bin(dm).count("1"), dm, to_mask(orb)))
    assert sorted(s for s, _, _ in firsts) == [25, 34]
    (_, d1, m1), (_, d2, _) = sorted(firsts, reverse=True)
    h1, h2 = set_stabilizer(b.group, from_mask(d1)), set_stabilizer(b.group, from_mask(d2))
    assert (h1.order, h2.order) == (48, 12)
    rest1 = from_mask(eng.all_mask & ~(d1 | u_mask))
    rest2 = from_mask(eng.all_mask & ~(d2 | u_mask | m1))
    assert (len(rest1), len(partition_into_orbits(h1, rest1))) == (146, 11)
    assert (len(rest2), len(partition_into_orbits(h2, rest2))) == (110, 21)

    assert len(res.rays) == N5_ORBIT_COUNT
    assert N5_SYMMETRIC_RAY in {format_entropy_vector(b.ps, r.ray.generator) for r in res.rays}
    assert dt < N5_LIMIT_S, f"{dt:.1f} s"

    got = {box.parent: [(r.cells(), r.status) for r in box.rows] for box in res.trace}
    assert len(res.trace) == len(REFERENCE_TRACE)
    diffs = []
    for parent, text in REFERENCE_TRACE.items():
        want = _parse_box(text)
        have = got.get(parent)
        if have is None:
            diffs.append(f"box {parent} missing")
            continue
        if len(have) != len(want):
            diffs.append(f"box {parent}: {len(have)} columns, expected {len(want)}")
            continue
        for t, (h, w) in enumerate(zip(have, want)):
            if h != w:
                diffs.append(f"box {parent} column {t + 1}: got {h}, expected {w}")
    assert not diffs, f"{len(diffs)} trace cells differ: " + "; ".join(diffs)


@pytest.mark.criterion(4, "N=4 genuine orbits equal the double-description oracle, under 1 min")
def test_criterion_4_four_parties():
    b, _, res, dt = _timed_run(4)
    oracle = dd_filter_pipeline(b.ps)
    assert res.orbit_keys() == {o.canonical for o in oracle}
    assert [r.orbit_size for r in res.rays] == [o.orbit_size for o in oracle]
    assert dt < N4_LIMIT_S, f"{dt:.1f} s"


def _n6_orbits():
    path = os.environ.get("DOWNSET_RAYS_N6_RESULT")
    if path:
        data = json.loads(Path(path).read_text())
        return [(tuple(o["vector"]), o["orbit_size"]) for o in data["orbits"]]
    if os.environ.get("DOWNSET_RAYS_SLOW") == "1":
        _, _, res, _ = _timed_run(6)
        return [(r.ray.generator, r.orbit_size) for r in res.rays]
    pytest.skip("N=6 takes hours; set DOWNSET_RAYS_N6_RESULT=<result.json> or DOWNSET_RAYS_SLOW=1")


@pytest.mark.criterion(5, "N=6: 220 orbits, 12 violate SSA, orbit sizes 7..5040")
def test_criterion_5_six_parties():
    orbits = _n6_orbits()
    ps = PartySystem(6)
    assert len(orbits) == N6_ORBITS
    bad = sum(1 for v, _ in orbits if not ssa_check(ps, v)[0])
    assert bad == N6_SSA_VIOLATING
    assert len(orbits) - bad == N6_ORBITS - N6_SSA_VIOLATING
    sizes = [s for _, s in orbits]
    assert (min(sizes), max(sizes)) == N6_ORBIT_SIZE_RANGE


@pytest.mark.criterion(6, "the SA-violating 1-dim KC-subspace generator is rejected")
def test_criterion_6_sa_violation_guard():
    ps, v = parse_entropy_vector(SA_VIOLATING_LINE)
    assert ps.n_parties == 6
    full = build_sac_system(ps, "full")
    ok, violated = satisfies_all(full.system, v)
    assert not ok and violated
    assert not sa_check(ps, v)[0]
    # it does span a 1-dim subspace whose vanishing set is a down-set
    eng = Engine(full.system, full.poset, full.group)
    zero = frozenset(i for i, x in enumerate(full.system.values(v)) if x == 0)
    assert full.poset.is_down_set(zero)
    assert eng.space(to_mask(zero)).dim == 1
    assert eng.as_der(v) is None


@pytest.mark.criterion(7, "property suites, 200 seeded cases each, zero failures")
def test_criterion_7_property_suites():
    failures = {}

    def count(name, fn):
        bad = 0
        for seed in range(PROPERTY_CASES):
            try:
                fn(seed)
            except AssertionError:
                bad += 1
        failures[name] = bad

    def inst(seed):
        return P.seeded_instance(seed)

    count("closure axioms", lambda s: P.check_closure_axioms(inst(s), *P.random_sets(inst(s), s)))
    count("closure commutation", lambda s: P.check_commutation(inst(s), P.random_sets(inst(s), s)[0]))
    count("orbit-stabilizer", lambda s: P.check_orbit_stabilizer(inst(s), P.random_sets(inst(s), s)[0]))
    count("engine vs brute force", lambda s: P.check_engine_vs_brute_force(inst(s)))
    count(
        "engine vs brute force, excluded region",
        lambda s: (lambda i: P.check_engine_vs_brute_force(i, P.excluded_of(i)))(P.seeded_instance(s, True)),
    )
    count("order and closure independence", lambda s: P.check_variant_independence(inst(s)))
    for n in (3, 4):
        base = _timed_run(n)[2].orbit_keys()
        for cfg in ({"closure_variant": "FD"}, {"order": "discovery"}, {"order": "size"}):
            failures.setdefault("SAC variants", 0)
            failures["SAC variants"] += _timed_run(n, **cfg)[2].orbit_keys() != base
    assert not any(failures.values()), failures


@pytest.mark.criterion(8, "graph models: Bell pair, star, 100 random graphs pass SA and SSA")
def test_criterion_8_graphs():
    assert graph_entropy(bell_pair()) == (1, 1, 0)
    b, _, res, _ = _timed_run(3)
    assert graph_entropy(star_graph(3)) == res.rays[0].ray.generator
    rng = random.Random(2024)
    for t in range(GRAPH_CASES):
        n = rng.randint(2, 5)
        g = random_graph(n, seed=rng.randrange(10**9), bulk=rng.randint(1, 5), extra_edges=rng.randint(0, 5))
        v = graph_entropy(g)
        ps = PartySystem(n)
        assert sa_check(ps, v)[0], t
        assert ssa_check(ps, v)[0], t


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
