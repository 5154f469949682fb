"""Independent reference computations used to check the engine.

Nothing here goes through the engine's closures, subspaces or LPs: the brute
force search only uses exact rank and nullspace primitives, and graph cuts are
checked by exhaustive bulk assignments.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .errors import GeometryError, GuardError, InputError
from .graphs import GraphModel
from .linalg import nullspace_basis, primitive, rank
from .permsym import PermGroup, Permutation, canonical_set, preserves_closed_family, set_orbit_size
from .polycone import InequalitySystem, inject_redundant
from .poset import Poset
from .sac import PartySystem, SacBuild, build_sac_system, ssa_check

DEFAULT_SUBSET_GUARD = 2_000_000


def _dot(row: Sequence[Fraction], v: Sequence[int]) -> Fraction:
    return sum((a * b for a, b in zip(row, v)), Fraction(0))


@dataclass(frozen=True)
class OracleRay:
    generator: tuple[int, ...]
    zero_set: frozenset[int]


def brute_force_ders(
    sys: InequalitySystem,
    poset: Poset,
    excluded: Iterable[int] = (),
    guard: int = DEFAULT_SUBSET_GUARD,
) -> list[OracleRay]:
    """All D-ERs avoiding ``excluded``, from every rank n-1 subset of duals."""
    n, k = sys.ambient_dim, sys.size
    excluded = frozenset(excluded)
    if n < 2:
        raise InputError("brute force needs ambient dimension at least 2")
    rows = [tuple(d) for d in sys.duals]
    distinct = sorted(set(rows))
    total = comb(len(distinct), n - 1)
    if total > guard:
        raise GuardError(f"{total} subsets exceed the brute-force guard {guard}")
    found: dict[frozenset[int], OracleRay] = {}
    for sub in itertools.combinations(distinct, n - 1):
        if rank(list(sub), n) != n - 1:
            continue
        (vec,) = nullspace_basis(list(sub), n)
        vals = [_dot(r, vec) for r in rows]
        if all(x <= 0 for x in vals):
            vec = tuple(-a for a in vec)
            vals = [-x for x in vals]
        if any(x < 0 for x in vals):
            continue
        zero = frozenset(i for i, x in enumerate(vals) if x == 0)
        if zero in found or zero & excluded:
            continue
        if not poset.is_down_set(zero):
            continue
        found[zero] = OracleRay(primitive(vec), zero)
    return sorted(found.values(), key=lambda r: r.generator)


def orbit_keys(group: PermGroup, rays: Iterable[OracleRay]) -> set[tuple[int, ...]]:
    return {canonical_set(group, r.zero_set) for r in rays}


def _extreme_rays(rows: list[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    """Extreme rays of {x : r.x >= 0 for all rows}, by incremental double description.

    Kept apart from the engine's geometry: adjacency is decided algebraically,
    by the rank of the rows saturated by both rays.
    """
    rows = sorted(set(r for r in rows if any(r)))
    if rank(rows, n) != n:
        raise GeometryError("oracle double description needs a pointed cone")
    basis: list[tuple[int, ...]] = []
    rest = []
    for r in rows:
        if len(basis) < n and rank(basis + [r], n) == len(basis) + 1:
            basis.append(r)
        else:
            rest.append(r)
    rays = []
    for t in range(n):
        (v,) = nullspace_basis([basis[j] for j in range(n) if j != t], n)
        if sum(a * b for a, b in zip(basis[t], v)) < 0:
            v = tuple(-a for a in v)
        rays.append(primitive(v))
    done = list(basis)
    for r in rest:
        vals = [sum(a * b for a, b in zip(r, v)) for v in rays]
        keep = [v for v, x in zip(rays, vals) if x >= 0]
        pos = [(v, x) for v, x in zip(rays, vals) if x > 0]
        neg = [(v, x) for v, x in zip(rays, vals) if x < 0]
        zsets = {v: frozenset(i for i, e in enumerate(done) if sum(a * b for a, b in zip(e, v)) == 0) for v, _ in pos + neg}
        for vp, xp in pos:
            for vq, xq in neg:
                common = zsets[vp] & zsets[vq]
                if len(common) < n - 2 or rank([done[i] for i in common], n) != n - 2:
                    continue
                keep.append(primitive(tuple(-xq * a + xp * b for a, b in zip(vp, vq))))
        rays = sorted(set(keep))
        done.append(r)
    return rays


# -- SAC pipeline ---------------------------------------------------------------


@dataclass
class OracleOrbit:
    canonical: tuple[int, ...]
    generator: tuple[int, ...]
    orbit_size: int
    ssa_ok: bool
    ssa_violations: int


def dd_filter_pipeline(ps: PartySystem, max_parties: int = 5, ssa: bool = True) -> list[OracleOrbit]:
    """Genuine KC-ER orbits from a double description of the Bell face.

    The face where every pairwise MI vanishes is parametrized by an integer
    basis; its extreme rays are filtered for the down-set property and for
    avoiding the genuine excluded set, then (optionally) for SSA, and grouped
    into party-permutation orbits.
    """
    if ps.n_parties > max_parties:
        raise GuardError(f"N={ps.n_parties} exceeds the oracle guard N<={max_parties}")
    b: SacBuild = build_sac_system(ps, "genuine")
    n = ps.ambient_dim
    duals = [tuple(int(x) for x in d) for d in b.system.duals]
    d0 = sorted(b.initial_down)
    basis = nullspace_basis([duals[i] for i in d0], n)
    dim = len(basis)
    if dim == 0:
        return []

    def lift(w):
        return tuple(sum(w[t] * basis[t][j] for t in range(dim)) for j in range(n))

    reduced = []
    for i, d in enumerate(duals):
        if i in b.initial_down:
            continue
        r = tuple(sum(d[j] * basis[t][j] for j in range(n)) for t in range(dim))
        if any(r):
            reduced.append(r)
    if dim == 1:
        rays = [(1,)] if all(r[0] >= 0 for r in reduced) else [(-1,)]
    else:
        rays = _extreme_rays([primitive(r) for r in reduced], dim)
    excluded = b.initial_excluded
    out: dict[tuple[int, ...], OracleOrbit] = {}
    for w in rays:
        v = primitive(lift(w))
        vals = [sum(a * x for a, x in zip(d, v)) for d in duals]
        if any(x < 0 for x in vals):
            continue
        zero = frozenset(i for i, x in enumerate(vals) if x == 0)
        if zero & excluded or not b.poset.is_down_set(zero):
            continue
        ok, bad = ssa_check(ps, v)
        if ssa and not ok:
            continue
        key = canonical_set(b.group, zero)
        if key not in out:
            out[key] = OracleOrbit(key, v, set_orbit_size(b.group, zero), ok, bad)
    return [out[k] for k in sorted(out)]


# -- random instances -------------------------------------------------------------

GROUP_CATALOG = ("trivial", "cyclic", "swap")


@dataclass(frozen=True)
class RandomInstanceSpec:
    """``inequality_count`` is met exactly for the trivial group and is an
    upper bound otherwise, since rows are drawn a whole orbit at a time."""

    ambient_dim: int = 3
    inequality_count: int = 6
    poset_density: float = 0.3
    group_choice: str = "trivial"
    seed: int = 0
    redundant_faces: int = 0
    entry_bound: int = 3


@dataclass
class RandomInstance:
    spec: RandomInstanceSpec
    system: InequalitySystem
    poset: Poset
    group: PermGroup
    coordinate_group: list[tuple[int, ...]] = field(default_factory=list)


def _coordinate_generators(choice: str, n: int) -> list[tuple[int, ...]]:
    if choice == "trivial":
        return []
    if choice == "cyclic":
        return [tuple((i + 1) % n for i in range(n))]
    if choice == "swap":
        if n < 2:
            return []
        img = list(range(n))
        img[0], img[1] = 1, 0
        return [tuple(img)]
    raise InputError(f"unknown group choice {choice!r}; catalog: {GROUP_CATALOG}")


def _permute_row(row: tuple[int, ...], img: tuple[int, ...]) -> tuple[int, ...]:
    # (g.E)(v) = E(g^{-1} v): coefficient at g(i) is the old coefficient at i
    out = [0] * len(row)
    for i, a in enumerate(row):
        out[img[i]] = a
    return tuple(out)


def _row_orbit(row: tuple[int, ...], gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    seen = [row]
    frontier = [row]
    while frontier:
        nxt = []
        for r in frontier:
            for g in gens:
                s = _permute_row(r, g)
                if s not in seen:
                    seen.append(s)
                    nxt.append(s)
        frontier = nxt
    return seen


def _index_permutation(duals: list[tuple[int, ...]], img: tuple[int, ...]) -> Permutation:
    pos = {d: i for i, d in enumerate(duals)}
    return Permutation(tuple(pos[_permute_row(d, img)] for d in duals))


def _try_instance(spec: RandomInstanceSpec, rng: random.Random):
    n = spec.ambient_dim
    gens = _coordinate_generators(spec.group_choice, n)
    duals: list[tuple[int, ...]] = []
    attempts = 0
    while len(duals) < spec.inequality_count:
        attempts += 1
        if attempts > 1000:
            # row orbits may not add up to the requested count exactly
            if len(duals) >= n:
                break
            return None
        row = tuple(rng.randint(-spec.entry_bound, spec.entry_bound) for _ in range(n))
        # a positive sum keeps (1,...,1) strictly inside the cone
        if sum(row) <= 0 or row in duals:
            continue
        orb = _row_orbit(primitive(row), gens)
        if any(r in duals for r in orb):
            continue
        if len(duals) + len(orb) > spec.inequality_count and len(duals) > 0:
            continue
        duals.extend(orb)
    try:
        sys = InequalitySystem(n, duals, interior_point=[1] * n)
    except GeometryError:
        return None
    return sys, gens


def _invariant_poset(k: int, group: PermGroup, density: float, rng: random.Random) -> Poset:
    orbits: list[list[int]] = []
    seen: set[int] = set()
    for i in range(k):
        if i in seen:
            continue
        orb = sorted(set(int(x) for x in group.elements[:, i]))
        seen.update(orb)
        orbits.append(orb)
    level = list(range(len(orbits)))
    rng.shuffle(level)
    orbit_of = {i: t for t, orb in enumerate(orbits) for i in orb}
    rel = set()
    pair_seen = set()
    for i in range(k):
        for j in range(k):
            if orbit_of[i] == orbit_of[j] or level[orbit_of[i]] >= level[orbit_of[j]]:
                continue
            if (i, j) in pair_seen:
                continue
            pair_orbit = {(int(g[i]), int(g[j])) for g in group.elements}
            pair_seen |= pair_orbit
            if rng.random() < density:
                rel |= pair_orbit
    return Poset(k, sorted(rel))


def random_instance(spec: RandomInstanceSpec) -> RandomInstance:
    """A reproducible random cone, invariant poset and symmetry group."""
    rng = random.Random(spec.seed)
    for _ in range(200):
        made = _try_instance(spec, rng)
        if made is None:
            continue
        sys, gens = made
        break
    else:
        raise GuardError("could not sample a full-dimensional pointed cone")
    duals = [tuple(int(x) for x in d) for d in sys.duals]
    group = PermGroup(sys.size, [_index_permutation(duals, g) for g in gens])
    poset = _invariant_poset(sys.size, group, spec.poset_density, rng)
    if spec.redundant_faces:
        faces = []
        for _ in range(spec.redundant_faces):
            size = rng.randint(1, min(2, sys.size))
            faces.append(sorted(rng.sample(range(sys.size), size)))
        sys = inject_redundant(sys, faces)
        # the new elements sit above everything, forming an antichain
        poset = poset.extend_with_top_antichain(len(faces))
        group = PermGroup.trivial(sys.size)
    inst = RandomInstance(spec, sys, poset, group, gens)
    return inst


def verify_group(inst: RandomInstance, samples: int = 20) -> bool:
    from .engine import cl_LD

    def closure(x):
        return cl_LD(inst.system, inst.poset, x)

    return preserves_closed_family(inst.group, closure, samples, seed=inst.spec.seed)


# -- graph oracle ---------------------------------------------------------------


def brute_force_graph_entropy(gm: GraphModel, bulk_guard: int = 20) -> tuple[Fraction, ...]:
    """Min cuts by trying every side assignment of the bulk vertices."""
    gm.validate()
    bulk = gm.bulk_vertices()
    if len(bulk) > bulk_guard:
        raise GuardError(f"{len(bulk)} bulk vertices exceed the guard {bulk_guard}")
    ps = gm.party_system
    out = []
    for idx in range(ps.ambient_dim):
        j = ps.subset(idx)
        best = None
        for bits in range(1 << len(bulk)):
            side = {v for t, v in enumerate(bulk) if bits >> t & 1}
            for v, lab in gm.labels.items():
                if lab is not None and lab in j:
                    side.add(v)
            cut = sum((w for u, v, w in gm.edges if (u in side) != (v in side)), Fraction(0))
            if best is None or cut < best:
                best = cut
        out.append(best)
    return tuple(out)


def random_graph(n_parties: int, seed: int, bulk: int = 3, extra_edges: int = 3, max_weight: int = 3) -> GraphModel:
    """A connected random graph: a bulk tree, one leaf per party, a few extra edges."""
    rng = random.Random(seed)
    labels: dict[str, int | None] = {f"b{i}": None for i in range(bulk)}
    edges = []
    for i in range(1, bulk):
        edges.append((f"b{rng.randrange(i)}", f"b{i}", rng.randint(1, max_weight)))
    for p in range(n_parties + 1):
        labels[f"p{p}"] = p
        edges.append((f"b{rng.randrange(bulk)}", f"p{p}", rng.randint(1, max_weight)))
    names = sorted(labels)
    for _ in range(extra_edges):
        u, v = rng.sample(names, 2)
        edges.append((u, v, rng.randint(1, max_weight)))
    return GraphModel(n_parties, labels, edges)
