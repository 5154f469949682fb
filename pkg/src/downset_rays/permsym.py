"""Permutation groups acting on inequality indices.

Groups are small (at most a few thousand elements), so the full element list
is materialized as an integer array with one row per element; orbits,
stabilizers and canonical forms are direct scans over that array.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import GuardError

DEFAULT_BOUND = 10_000


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("images do not form a bijection")

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(k)))

    @classmethod
    def from_cycles(cls, k: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(k))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def apply(self, x: Iterable[int]) -> frozenset[int]:
        return frozenset(self.images[i] for i in x)

    def __mul__(self, other: "Permutation") -> "Permutation":
        """(self * other)(i) = self(other(i))."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))


class PermGroup:
    """A permutation group on {0..degree-1} with all elements listed.

    ``root_index`` records, for subgroups built by :func:`set_stabilizer`, the
    position of each element in the root group's element array.
    """

    def __init__(
        self,
        degree: int,
        generators: Iterable[Permutation] = (),
        *,
        bound: int = DEFAULT_BOUND,
        _elements: np.ndarray | None = None,
        _root_index: np.ndarray | None = None,
    ):
        self.degree = degree
        self.generators = tuple(generators)
        for g in self.generators:
            if g.degree != degree:
                raise ValueError("generator degree mismatch")
        if _elements is None:
            _elements = _close(degree, self.generators, bound)
        self.elements = _elements
        self.root_index = _root_index if _root_index is not None else np.arange(len(_elements))

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree)

    @classmethod
    def from_array(cls, arr: np.ndarray, root_index: np.ndarray | None = None) -> "PermGroup":
        arr = np.asarray(arr)
        gens = tuple(Permutation(tuple(int(x) for x in row)) for row in arr)
        return cls(arr.shape[1], gens, _elements=arr, _root_index=root_index)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element(self, t: int) -> Permutation:
        return Permutation(tuple(int(x) for x in self.elements[t]))

    def __iter__(self):
        for t in range(self.order):
            yield self.element(t)

    def subgroup(self, rows: np.ndarray) -> "PermGroup":
        arr = self.elements[rows]
        return PermGroup(self.degree, (), _elements=arr, _root_index=self.root_index[rows])

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"


def _close(degree: int, gens: Sequence[Permutation], bound: int) -> np.ndarray:
    ident = tuple(range(degree))
    seen = {ident: 0}
    elems = [np.arange(degree, dtype=np.int32)]
    garr = [np.array(g.images, dtype=np.int32) for g in gens]
    frontier = [elems[0]]
    while frontier:
        nxt = []
        for e in frontier:
            for g in garr:
                h = g[e]
                key = tuple(h.tolist())
                if key not in seen:
                    seen[key] = len(elems)
                    elems.append(h)
                    nxt.append(h)
                    if len(elems) > bound:
                        raise GuardError(f"group order exceeds {bound}")
        frontier = nxt
    return np.array(elems, dtype=np.int32).reshape(len(elems), degree)


def _index_array(x: Iterable[int]) -> np.ndarray:
    return np.array(sorted(x), dtype=np.int64)


def orbit_of_element(g: PermGroup, i: int) -> frozenset[int]:
    return frozenset(np.unique(g.elements[:, i]).tolist())


def partition_into_orbits(g: PermGroup, x: Iterable[int]) -> list[frozenset[int]]:
    """Orbits of the elements of x, ordered by their smallest member."""
    x = frozenset(x)
    left = set(x)
    out = []
    for i in sorted(x):
        if i not in left:
            continue
        orb = orbit_of_element(g, i)
        if not orb <= x:
            raise ValueError("set is not invariant under the group")
        left -= orb
        out.append(orb)
    return out


def _inside_mask(g: PermGroup, x: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    idx = _index_array(x)
    member = np.zeros(g.degree, dtype=bool)
    member[idx] = True
    return idx, member


def set_stabilizer(g: PermGroup, x: Iterable[int]) -> PermGroup:
    idx, member = _inside_mask(g, x)
    if len(idx) == 0:
        return g
    keep = np.all(member[g.elements[:, idx]], axis=1)
    return g.subgroup(np.flatnonzero(keep))


def is_invariant(g: PermGroup, x: Iterable[int]) -> bool:
    idx, member = _inside_mask(g, x)
    if len(idx) == 0:
        return True
    return bool(np.all(member[g.elements[:, idx]]))


def orbit_completion(g: PermGroup, x: Iterable[int]) -> frozenset[int]:
    idx = _index_array(x)
    if len(idx) == 0:
        return frozenset()
    return frozenset(np.unique(g.elements[:, idx]).tolist())


def canonical_set(g: PermGroup, x: Iterable[int]) -> tuple[int, ...]:
    """Lexicographically smallest sorted image of x under g."""
    idx = _index_array(x)
    if len(idx) == 0:
        return ()
    images = np.sort(g.elements[:, idx], axis=1)
    # lexsort uses the last key as primary
    best = np.lexsort(images.T[::-1])[0]
    return tuple(int(v) for v in images[best])


def canonical_with_element(g: PermGroup, x: Iterable[int]) -> tuple[tuple[int, ...], int]:
    """canonical_set together with the row of an element attaining it."""
    idx = _index_array(x)
    if len(idx) == 0:
        return (), 0
    images = np.sort(g.elements[:, idx], axis=1)
    best = int(np.lexsort(images.T[::-1])[0])
    return tuple(int(v) for v in images[best]), best


def set_orbit_size(g: PermGroup, x: Iterable[int]) -> int:
    return g.order // set_stabilizer(g, x).order


def preserves_closed_family(
    g: PermGroup,
    closure: Callable[[frozenset[int]], frozenset[int]],
    samples: int,
    seed: int = 0,
    universe: int | None = None,
) -> bool:
    """Sampled check that generators map closed sets to closed sets and commute with closure."""
    k = universe if universe is not None else g.degree
    rng = random.Random(seed)
    gens = list(g.generators) or [g.element(t) for t in range(g.order)]
    for _ in range(samples):
        size = rng.randint(0, max(0, min(k, 4)))
        y = frozenset(rng.sample(range(k), size))
        cy = closure(y)
        for h in gens:
            hx = h.apply(cy)
            if closure(hx) != hx:
                return False
            if closure(h.apply(y)) != hx:
                return False
    return True
