"""Enumeration of down-set extreme rays by closures and orbit pruning.

A triplet (D, U, G_D) stands for the face F_D of the cone together with an
excluded region: rays saturating any member of U are searched for elsewhere.
The main subroutine splits a triplet into smaller ones by adding orbits of
maximal elements of M∖(D∪U) to D and closing; the global loop runs it on a
work queue until every triplet meets the stop criterion.

Index sets are frozensets at the API boundary and bitmask integers inside.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import GeometryError, InputError
from .linalg import Subspace, as_array, matmul, nullspace_basis, primitive, rank
from .permsym import (
    PermGroup,
    canonical_set,
    is_invariant,
    orbit_completion,
    partition_into_orbits,
    set_orbit_size,
    set_stabilizer,
)
from .polycone import InequalitySystem, Ray, double_description, face_closure
from .poset import Poset, from_mask, mask_members, to_mask


@dataclass(frozen=True)
class Triplet:
    down_set: frozenset[int]
    excluded: frozenset[int]
    stabilizer: PermGroup = field(compare=False, repr=False)

    def __repr__(self) -> str:
        return f"Triplet(|D|={len(self.down_set)}, |U|={len(self.excluded)}, |G_D|={self.stabilizer.order})"


@dataclass
class EngineConfig:
    """Knobs of the enumeration.

    The stop criterion is "subspace dim <= stop_dim" or, when set,
    "|U|/|M| >= stop_excluded_frac"; ``stop_fn`` overrides both.  ``order``
    names a registered ordering of the new triplets; ``order_fn`` overrides it.
    ``stabilizer_scope`` picks the group a child stabilizer is taken in:
    the whole symmetry group ("global") or the parent's stabilizer ("parent").
    ``update_residual`` also extends the excluded set of the triplet that
    keeps D unchanged, exactly as for the other new triplets.
    """

    closure_variant: str = "LD"
    stop_dim: int = 1
    stop_excluded_frac: Fraction | None = None
    order: str = "default"
    dedup_queue: bool = False
    simplicial_shortcut: bool = True
    update_residual: bool = True
    simplicial_max_dim: int = 8
    stabilizer_scope: str = "global"
    jobs: int = 1
    stop_fn: Callable | None = None
    order_fn: Callable | None = None

    def __post_init__(self):
        self.closure_variant = self.closure_variant.upper()
        if self.closure_variant not in ("LD", "FD"):
            raise InputError(f"unknown closure variant {self.closure_variant!r}")
        if self.stabilizer_scope not in ("global", "parent"):
            raise InputError(f"unknown stabilizer scope {self.stabilizer_scope!r}")
        if self.order_fn is None and self.order not in ORDERS:
            raise InputError(f"unknown order {self.order!r}; choose from {sorted(ORDERS)}")
        if self.stop_excluded_frac is not None:
            self.stop_excluded_frac = Fraction(self.stop_excluded_frac)

    def echo(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k not in ("stop_fn", "order_fn")}
        d["stop_excluded_frac"] = None if self.stop_excluded_frac is None else str(self.stop_excluded_frac)
        d["stop_fn"] = None if self.stop_fn is None else getattr(self.stop_fn, "__name__", "custom")
        d["order_fn"] = None if self.order_fn is None else getattr(self.order_fn, "__name__", "custom")
        return d


@dataclass(frozen=True)
class Candidate:
    """What an ordering function sees about a new triplet (D_m, M_m)."""

    dim: int
    size: int
    canonical: tuple[int, ...]
    discovery: int
    orbit_size: int


def _order_default(c: Candidate):
    return (c.dim, -c.size, -c.orbit_size, c.canonical)


def _order_discovery(c: Candidate):
    return (c.dim, -c.size, c.discovery)


def _order_dim_desc(c: Candidate):
    return (-c.dim, c.size, c.canonical)


def _order_size(c: Candidate):
    return (-c.size, c.dim, c.canonical)


ORDERS: dict[str, Callable[[Candidate], object]] = {
    "default": _order_default,
    "discovery": _order_discovery,
    "dim-desc": _order_dim_desc,
    "size": _order_size,
}


@dataclass(frozen=True)
class TraceRow:
    down: int
    dim: int
    excluded: int
    rank: int
    status: str  # y open, b simplicial, g deficit 1 or line, r discarded

    def cells(self) -> tuple[int, int, int, int]:
        return (self.down, self.dim, self.excluded, self.rank)


@dataclass
class TraceBox:
    parent: tuple[int, int, int, int]
    rows: list[TraceRow]


@dataclass(frozen=True)
class FoundRay:
    vector: tuple[int, ...]
    zero_set: frozenset[int]
    source: str


@dataclass(frozen=True)
class RayRecord:
    ray: Ray
    down_set: frozenset[int]
    canonical: tuple[int, ...]
    orbit_size: int


@dataclass
class EnumerationResult:
    rays: list[RayRecord]
    open_triplets: list[Triplet]
    trace: list[TraceBox]
    stats: dict
    found: list[FoundRay] = field(default_factory=list)

    def orbit_keys(self) -> set[tuple[int, ...]]:
        return {r.canonical for r in self.rays}


class Engine:
    """Shared read-only state for one enumeration: system, poset, group."""

    def __init__(
        self,
        sys: InequalitySystem,
        poset: Poset,
        group: PermGroup,
        cfg: EngineConfig | None = None,
        region: Iterable[int] = (),
    ):
        if poset.size != sys.size or group.degree != sys.size:
            raise InputError("system, poset and group must share the index set")
        self.sys = sys
        self.poset = poset
        self.group = group
        self.cfg = cfg or EngineConfig()
        self.k = sys.size
        self.all_mask = (1 << self.k) - 1
        self.matrix = sys.matrix
        self.exact = sys._exact if sys._exact is not None else sys.matrix
        self._spaces: dict[int, Subspace] = {0: Subspace.full(sys.ambient_dim)}
        self.order_fn = self.cfg.order_fn or ORDERS[self.cfg.order]
        # excluded region of the whole cone; line rays are only tested against it
        self.region = to_mask(region)

    # -- subspaces and closures ---------------------------------------------

    def _rows(self, mask: int) -> np.ndarray:
        return self.matrix[mask_members(mask)]

    def space(self, mask: int) -> Subspace:
        s = self._spaces.get(mask)
        if s is None:
            s = self._spaces[0].restrict(self._rows(mask)) if mask else self._spaces[0]
            if len(self._spaces) > 20000:
                self._spaces = {0: self._spaces[0]}
            self._spaces[mask] = s
        return s

    def _vanishing_mask(self, space: Subspace) -> int:
        return to_mask(np.flatnonzero(space.vanishing(self.matrix)).tolist())

    def close(self, x: int, base: int = 0, base_space: Subspace | None = None, avoid: int = 0):
        """Composed closure of x ∪ base, where base is already closed.

        Returns (mask, subspace, hit); with ``avoid`` set the iteration stops
        as soon as the running set meets it, and hit is True.
        """
        if base_space is None:
            base_space = self.space(base)
        cur = self.poset.down_mask(x | base)
        space = base_space.restrict(self._rows(cur & ~base)) if cur & ~base else base_space
        fd = self.cfg.closure_variant == "FD"
        while True:
            if cur & avoid:
                return cur, space, True
            if fd:
                lin = to_mask(face_closure(self.sys, from_mask(cur), space)) | cur
                extra_rows = lin & ~cur
            else:
                lin = self._vanishing_mask(space) | cur
                extra_rows = 0
            new = self.poset.down_mask(lin)
            if new == cur:
                self._spaces.setdefault(cur, space)
                return cur, space, False
            extra_rows |= new & ~lin
            if extra_rows:
                space = space.restrict(self._rows(extra_rows))
            cur = new

    def closure(self, x: Iterable[int]) -> frozenset[int]:
        return from_mask(self.close(to_mask(x))[0])

    def reduced_rank(self, space: Subspace, mask: int) -> int:
        if not mask or space.dim == 0:
            return 0
        coords = space.coordinates(self._rows(mask)).tolist()
        return rank(coords, space.dim)

    # -- rays ---------------------------------------------------------------

    def _values(self, v: Sequence[int]) -> list[int]:
        col = as_array([[int(x) for x in v]], self.sys.ambient_dim).T
        return [int(s) for s in matmul(self.matrix, col)[:, 0].tolist()]

    def as_der(self, vec: Sequence[int], orient: bool = True) -> tuple[tuple[int, ...], int] | None:
        """(primitive generator, saturation mask) if vec (or -vec) spans a D-ER."""
        vals = self._values(vec)
        if all(x >= 0 for x in vals):
            pass
        elif orient and all(x <= 0 for x in vals):
            vec = [-x for x in vec]
            vals = [-x for x in vals]
        else:
            return None
        if not any(vec):
            return None
        zero = to_mask(i for i, x in enumerate(vals) if x == 0)
        if self.poset.down_mask(zero) != zero:
            return None
        if rank(self._rows(zero).tolist(), self.sys.ambient_dim) != self.sys.ambient_dim - 1:
            return None
        return primitive(vec), zero

    def accept_ray(self, vec: Sequence[int], excluded: int, source: str, orient: bool = True) -> FoundRay | None:
        """Keep a candidate if it (or its negative) is a D-ER outside the excluded set."""
        der = self.as_der(vec, orient)
        if der is None or der[1] & excluded:
            return None
        return FoundRay(der[0], from_mask(der[1]), source)

    def line_ray(self, space: Subspace, source: str) -> tuple[bool, FoundRay | None]:
        """Whether a 1-dim subspace spans a D-ER, and the ray if it lies outside the cone's excluded region."""
        assert space.dim == 1
        der = self.as_der(space.rows[0])
        if der is None:
            return False, None
        if der[1] & self.region:
            return True, None
        return True, FoundRay(der[0], from_mask(der[1]), source)

    def _reduced_rows(self, space: Subspace, mask: int) -> tuple[list[int], list[tuple[int, ...]]]:
        idx = mask_members(mask)
        if not idx:
            return [], []
        coords = space.coordinates(self.matrix[idx]).tolist()
        return idx, [tuple(int(a) for a in r) for r in coords]

    def _lift(self, space: Subspace, w: Sequence[int]) -> tuple[int, ...]:
        combo = matmul(as_array([list(w)], space.dim), space.array)
        return primitive(int(x) for x in combo[0].tolist())

    def _local_ok(self, idx: list[int], rows, w, rest: int) -> bool:
        """Down-set conditions visible in the reduced system alone."""
        zero = 0
        for i, r in zip(idx, rows):
            if sum(a * b for a, b in zip(r, w)) == 0:
                zero |= 1 << i
        return (self.poset.down_mask(zero) & rest) == zero

    def simplicial_rays(self, t: Triplet, space: Subspace | None = None) -> list[FoundRay] | None:
        """Rays read off directly when the face is a simplicial cone, else None.

        Only attempted up to ``cfg.simplicial_max_dim``; the rays come from a
        double description of the face inside its own span.
        """
        d_mask, u_mask = to_mask(t.down_set), to_mask(t.excluded)
        space = space or self.space(d_mask)
        d = space.dim
        if d > self.cfg.simplicial_max_dim:
            return None
        idx, rows = self._reduced_rows(space, self.all_mask & ~d_mask)
        dirs = sorted({primitive(r) for r in rows if any(r)})
        if len(dirs) < d or rank(dirs, d) != d:
            return None
        face_rays = double_description(InequalitySystem(d, dirs, validate=False))
        if len(face_rays) != d:
            return None
        out = []
        for ray in face_rays:
            r = self.accept_ray(self._lift(space, ray.generator), u_mask, "simplicial", orient=False)
            if r is not None:
                out.append(r)
        return out

    def post_process(self, t: Triplet) -> list[FoundRay]:
        """Rays of an open triplet by double description on the reduced cone."""
        d_mask, u_mask = to_mask(t.down_set), to_mask(t.excluded)
        space = self.space(d_mask)
        rest = self.all_mask & ~(d_mask | u_mask)
        idx, rows = self._reduced_rows(space, rest)
        live = [r for r in rows if any(r)]
        if not live:
            return []
        if rank(live, space.dim) != space.dim:
            raise GeometryError("reduced cone of an open triplet is not pointed")
        red = InequalitySystem(space.dim, live, validate=False)
        out = []
        for ray in double_description(red):
            w = ray.generator
            if not self._local_ok(idx, rows, w, rest):
                continue
            r = self.accept_ray(self._lift(space, w), u_mask, "post-process", orient=False)
            if r is not None:
                out.append(r)
        return out

    # -- triplets -----------------------------------------------------------

    def stats(self, d_mask: int, u_mask: int, space: Subspace | None = None) -> tuple[int, int, int, int]:
        space = space or self.space(d_mask)
        rest = self.all_mask & ~(d_mask | u_mask)
        return (bin(d_mask).count("1"), space.dim, bin(u_mask).count("1"), self.reduced_rank(space, rest))

    def is_stopped(self, t: Triplet) -> bool:
        cfg = self.cfg
        space = self.space(to_mask(t.down_set))
        if cfg.stop_fn is not None:
            return bool(cfg.stop_fn(t, space.dim, self))
        if space.dim <= cfg.stop_dim:
            return True
        if cfg.stop_excluded_frac is not None and Fraction(len(t.excluded), self.k) >= cfg.stop_excluded_frac:
            return True
        return False

    def check_conditions(self, t: Triplet) -> dict[str, bool | int]:
        d_mask, u_mask = to_mask(t.down_set), to_mask(t.excluded)
        space = self.space(d_mask)
        deficit = space.dim - self.reduced_rank(space, self.all_mask & ~(d_mask | u_mask))
        return {
            "disjoint": not (d_mask & u_mask),
            "dim_gt_1": space.dim > 1,
            "invariant": is_invariant(t.stabilizer, t.excluded),
            "deficit": deficit,
            "deficit_zero": deficit == 0,
        }

    def validated(self, t: Triplet) -> bool:
        c = self.check_conditions(t)
        return bool(c["disjoint"] and c["dim_gt_1"] and c["invariant"] and c["deficit_zero"])

    def algorithm5_update(self, t: Triplet) -> Triplet:
        h = t.stabilizer
        d_mask = to_mask(t.down_set)
        u = orbit_completion(h, t.excluded)
        u_mask = to_mask(u)
        space = self.space(d_mask)
        rest = from_mask(self.all_mask & ~(d_mask | u_mask))
        add = 0
        for orb in partition_into_orbits(h, rest):
            rep = min(orb)
            _, _, hit = self.close(1 << rep, d_mask, space, avoid=u_mask)
            if hit:
                add |= to_mask(orb)
        return Triplet(t.down_set, from_mask(u_mask | add), h)

    def triage(self, t: Triplet) -> tuple[str, list[FoundRay]]:
        """Classify a new triplet by dimension and rank deficit.

        Returns ("keep" | "simplicial" | "ray" | "discard", rays).
        """
        d_mask, u_mask = to_mask(t.down_set), to_mask(t.excluded)
        space = self.space(d_mask)
        if d_mask & u_mask:
            return "discard", []
        if space.dim <= 1:
            if space.dim == 1:
                ok, r = self.line_ray(space, "line")
                return ("ray", [r] if r else []) if ok else ("discard", [])
            return "discard", []
        rest = self.all_mask & ~(d_mask | u_mask)
        deficit = space.dim - self.reduced_rank(space, rest)
        if deficit == 0:
            if self.cfg.simplicial_shortcut:
                rays = self.simplicial_rays(t, space)
                if rays is not None:
                    return "simplicial", rays
            return "keep", []
        if deficit == 1:
            line = space.restrict(self._rows(rest))
            ok, r = self.line_ray(line, "deficit-1")
            return ("ray", [r] if r else []) if ok else ("discard", [])
        return "discard", []

    def main_subroutine(self, t: Triplet) -> tuple[list[Triplet], list[FoundRay], TraceBox]:
        h = t.stabilizer
        d_mask, u_mask = to_mask(t.down_set), to_mask(t.excluded)
        d_space = self.space(d_mask)
        parent_stats = self.stats(d_mask, u_mask, d_space)
        rest = self.all_mask & ~(d_mask | u_mask)
        top = self.poset.maximal_mask(rest)
        rays: list[FoundRay] = []
        u_bar = u_mask
        kept = []  # (D_m mask, space, orbit mask, discovery)
        for pos, orb in enumerate(partition_into_orbits(h, from_mask(top))):
            rep = min(orb)
            dm, sm, hit = self.close(1 << rep, d_mask, d_space, avoid=u_mask)
            omask = to_mask(orb)
            if hit:
                u_bar |= omask
                continue
            if sm.dim <= 1:
                if sm.dim == 1:
                    _, r = self.line_ray(sm, "line")
                    if r is not None:
                        rays.append(r)
                u_bar |= omask
                continue
            kept.append((dm, sm, omask, pos))
        # faces equivalent under G_D are merged, their orbits united
        merged: dict[tuple[int, ...], list] = {}
        for dm, sm, omask, pos in kept:
            key = canonical_set(h, from_mask(dm))
            if key in merged:
                merged[key][2] |= omask
            else:
                merged[key] = [dm, sm, omask, pos]
        cands = []
        for key, (dm, sm, omask, pos) in merged.items():
            c = Candidate(sm.dim, bin(dm).count("1"), key, pos, bin(omask).count("1"))
            cands.append((self.order_fn(c), dm, sm, omask))
        cands.sort(key=lambda z: z[0])
        scope = self.group if self.cfg.stabilizer_scope == "global" else h
        children: list[Triplet] = []
        u_q = u_bar
        prev_m = 0
        for _, dm, sm, omask in cands:
            u_q |= prev_m
            hq = set_stabilizer(scope, from_mask(dm))
            child = self.algorithm5_update(Triplet(from_mask(dm), from_mask(u_q), hq))
            children.append(child)
            prev_m = omask
        residual = Triplet(t.down_set, from_mask(u_mask | top), h)
        if self.cfg.update_residual:
            residual = self.algorithm5_update(residual)
        children.append(residual)
        rows = []
        survivors = []
        for child in children:
            cd, cu = to_mask(child.down_set), to_mask(child.excluded)
            st = self.stats(cd, cu)
            status, found = self.triage(child)
            rays.extend(found)
            letter = {"keep": "y", "simplicial": "b", "ray": "g", "discard": "r"}[status]
            rows.append(TraceRow(*st, letter))
            if status == "keep":
                survivors.append(child)
        return survivors, rays, TraceBox(parent_stats, rows)

    # -- results ------------------------------------------------------------

    def finalize(self, found: Iterable[FoundRay]) -> list[RayRecord]:
        by_key: dict[tuple[int, ...], frozenset[int]] = {}
        for r in found:
            key = canonical_set(self.group, r.zero_set)
            by_key.setdefault(key, frozenset(key))
        out = []
        n = self.sys.ambient_dim
        for key in sorted(by_key):
            z = by_key[key]
            (vec,) = nullspace_basis(self._rows(to_mask(z)).tolist(), n) if n > 1 else [(1,)]
            if any(x < 0 for x in self._values(vec)):
                vec = tuple(-a for a in vec)
            out.append(RayRecord(Ray(primitive(vec)), z, key, set_orbit_size(self.group, z)))
        return out


# -- module-level API -----------------------------------------------------------


def cl_LD(sys: InequalitySystem, poset: Poset, x: Iterable[int]) -> frozenset[int]:
    eng = Engine(sys, poset, PermGroup.trivial(sys.size), EngineConfig(closure_variant="LD"))
    return eng.closure(x)


def cl_FD(sys: InequalitySystem, poset: Poset, x: Iterable[int]) -> frozenset[int]:
    eng = Engine(sys, poset, PermGroup.trivial(sys.size), EngineConfig(closure_variant="FD"))
    return eng.closure(x)


def check_conditions(t: Triplet, sys: InequalitySystem, poset: Poset) -> dict[str, bool | int]:
    return Engine(sys, poset, PermGroup.trivial(sys.size)).check_conditions(t)


def initial_triplet(group: PermGroup, down: Iterable[int], excluded: Iterable[int]) -> Triplet:
    down = frozenset(down)
    return Triplet(down, frozenset(excluded), set_stabilizer(group, down))


def _to_wire(t: Triplet) -> dict:
    return {
        "D": sorted(t.down_set),
        "U": sorted(t.excluded),
        "G": t.stabilizer.root_index.tolist(),
    }


def _from_wire(eng: Engine, d: dict) -> Triplet:
    g = eng.group.subgroup(np.array(d["G"], dtype=np.int64))
    return Triplet(frozenset(d["D"]), frozenset(d["U"]), g)


def _box_to_wire(b: TraceBox) -> dict:
    return {"parent": list(b.parent), "rows": [[*r.cells(), r.status] for r in b.rows]}


def _box_from_wire(d: dict) -> TraceBox:
    return TraceBox(tuple(d["parent"]), [TraceRow(*r) for r in d["rows"]])


def _ray_to_wire(r: FoundRay) -> dict:
    return {"v": list(r.vector), "Z": sorted(r.zero_set), "src": r.source}


def _ray_from_wire(d: dict) -> FoundRay:
    return FoundRay(tuple(d["v"]), frozenset(d["Z"]), d["src"])


_WORKER: Engine | None = None


def _worker_init(eng: Engine) -> None:
    global _WORKER
    _WORKER = eng


def _worker_step(wire: dict):
    eng = _WORKER
    kids, rays, box = eng.main_subroutine(_from_wire(eng, wire))
    return [_to_wire(k) for k in kids], [_ray_to_wire(r) for r in rays], _box_to_wire(box)


def _pair_key(group: PermGroup, t: Triplet) -> tuple:
    """Canonical form of (D, U) under the group for queue deduplication."""
    d = np.array(sorted(t.down_set), dtype=np.int64)
    u = np.array(sorted(t.excluded), dtype=np.int64)
    if len(d):
        imgs = np.sort(group.elements[:, d], axis=1)
        best = imgs[np.lexsort(imgs.T[::-1])[0]]
        rows = np.flatnonzero(np.all(imgs == best, axis=1))
    else:
        best = np.zeros(0, dtype=np.int64)
        rows = np.arange(group.order)
    if len(u):
        uimgs = np.sort(group.elements[rows][:, u], axis=1)
        ubest = uimgs[np.lexsort(uimgs.T[::-1])[0]]
    else:
        ubest = np.zeros(0, dtype=np.int64)
    return (tuple(best.tolist()), tuple(ubest.tolist()))


def run(
    initial: Triplet,
    sys: InequalitySystem,
    poset: Poset,
    cfg: EngineConfig | None = None,
    group: PermGroup | None = None,
    *,
    checkpoint: str | Path | None = None,
    resume: bool = False,
    max_generations: int | None = None,
    progress: Callable[[str], None] | None = None,
) -> EnumerationResult:
    """The global loop.

    Triplets are processed generation by generation in queue order, which is
    the same FIFO order as one-at-a-time processing and lets a generation be
    farmed out to worker processes without changing the output.
    """
    cfg = cfg or EngineConfig()
    group = group if group is not None else initial.stabilizer
    eng = Engine(sys, poset, group, cfg, region=initial.excluded)
    t0 = time.perf_counter()
    found: list[FoundRay] = []
    trace: list[TraceBox] = []
    opened: list[Triplet] = []
    seen: set = set()
    stats = {"iterations": 0, "generations": 0}
    queue: list[Triplet] = []
    if resume and checkpoint and Path(checkpoint).exists():
        state = json.loads(Path(checkpoint).read_text())
        queue = [_from_wire(eng, w) for w in state["queue"]]
        opened = [_from_wire(eng, w) for w in state["open"]]
        found = [_ray_from_wire(w) for w in state["rays"]]
        trace = [_box_from_wire(b) for b in state["trace"]]
        stats.update(state["stats"])
        seen = {(tuple(a), tuple(b)) for a, b in state.get("seen", [])}
    else:
        d_mask, u_mask = to_mask(initial.down_set), to_mask(initial.excluded)
        if d_mask & u_mask:
            stats["degenerate"] = "initial down-set meets the excluded set"
        else:
            status, rays = eng.triage(initial)
            found.extend(rays)
            stats["initial_status"] = status
            if status == "keep":
                queue.append(initial)
    pool = None
    try:
        while queue:
            if max_generations is not None and stats["generations"] >= max_generations:
                break
            batch, queue = queue, []
            work = []
            for t in batch:
                if eng.is_stopped(t):
                    opened.append(t)
                else:
                    work.append(t)
            if pool is None and cfg.jobs > 1 and len(work) > 1:
                from concurrent.futures import ProcessPoolExecutor

                # started on first use, so small runs never pay for it
                pool = ProcessPoolExecutor(max_workers=cfg.jobs, initializer=_worker_init, initargs=(eng,))
            if pool is not None:
                outs = list(pool.map(_worker_step, [_to_wire(t) for t in work]))
                results = [
                    ([_from_wire(eng, w) for w in kids], [_ray_from_wire(r) for r in rs], _box_from_wire(b))
                    for kids, rs, b in outs
                ]
            else:
                results = [eng.main_subroutine(t) for t in work]
            for kids, rays, box in results:
                stats["iterations"] += 1
                found.extend(rays)
                trace.append(box)
                for kid in kids:
                    if cfg.dedup_queue:
                        key = _pair_key(group, kid)
                        if key in seen:
                            stats["deduplicated"] = stats.get("deduplicated", 0) + 1
                            continue
                        seen.add(key)
                    queue.append(kid)
            stats["generations"] += 1
            if progress:
                progress(
                    f"generation {stats['generations']}: {len(work)} processed, {len(queue)} queued, {len(found)} candidate rays"
                )
            if checkpoint:
                _write_checkpoint(checkpoint, queue, opened, found, trace, stats, seen, cfg)
    finally:
        if pool is not None:
            pool.shutdown()
    opened.extend(queue)
    stats["wall_time"] = time.perf_counter() - t0
    stats["candidate_rays"] = len(found)
    rays = eng.finalize(found)
    stats["orbits"] = len(rays)
    return EnumerationResult(rays, opened, trace, stats, found)


def _write_checkpoint(path, queue, opened, found, trace, stats, seen, cfg) -> None:
    state = {
        "config": cfg.echo(),
        "queue": [_to_wire(t) for t in queue],
        "open": [_to_wire(t) for t in opened],
        "rays": [_ray_to_wire(r) for r in found],
        "trace": [_box_to_wire(b) for b in trace],
        "stats": {k: v for k, v in stats.items() if k != "wall_time"},
        "seen": [[list(a), list(b)] for a, b in sorted(seen)],
    }
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(state))
    tmp.replace(path)


def main_subroutine(t: Triplet, sys: InequalitySystem, poset: Poset, cfg: EngineConfig | None = None, group=None):
    eng = Engine(sys, poset, group if group is not None else t.stabilizer, cfg)
    if not eng.validated(t):
        raise ValueError("main_subroutine needs a triplet satisfying all four conditions")
    kids, rays, box = eng.main_subroutine(t)
    return kids, rays, box


def algorithm5_update(t: Triplet, sys: InequalitySystem, poset: Poset, cfg: EngineConfig | None = None) -> Triplet:
    return Engine(sys, poset, t.stabilizer, cfg).algorithm5_update(t)


def post_process(open_t: Triplet, sys: InequalitySystem, poset: Poset, group: PermGroup | None = None) -> list[FoundRay]:
    return Engine(sys, poset, group if group is not None else open_t.stabilizer).post_process(open_t)


def simplicial_check(t: Triplet, sys: InequalitySystem, poset: Poset) -> list[FoundRay] | None:
    return Engine(sys, poset, t.stabilizer).simplicial_rays(t)
