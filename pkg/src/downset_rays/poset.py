"""Finite posets over inequality indices.

The order is stored as two lists of bitmasks, ``down[i]`` = {j : j <= i} and
``up[i]`` = {j : j >= i}, so closures and order queries are bit operations.
"""

from __future__ import annotations

from typing import Callable, Iterable

IndexSet = frozenset


def to_mask(x: Iterable[int]) -> int:
    m = 0
    for i in x:
        m |= 1 << i
    return m


def from_mask(m: int) -> frozenset[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return frozenset(out)


def mask_members(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


class Poset:
    """A partial order on {0, ..., size-1}."""

    def __init__(self, size: int, relations: Iterable[tuple[int, int]] = ()):
        """Build from pairs (i, j) meaning i < j; the transitive closure is taken."""
        self.size = size
        preds: list[list[int]] = [[] for _ in range(size)]
        indeg = [0] * size
        succs: list[list[int]] = [[] for _ in range(size)]
        for a, b in relations:
            if not (0 <= a < size and 0 <= b < size):
                raise ValueError(f"relation ({a}, {b}) out of range")
            if a == b:
                continue
            preds[b].append(a)
            succs[a].append(b)
            indeg[b] += 1
        order = [i for i in range(size) if indeg[i] == 0]
        for i in order:
            for j in succs[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    order.append(j)
        if len(order) != size:
            raise ValueError("relation has a cycle; not a partial order")
        down = [1 << i for i in range(size)]
        for i in order:
            for a in preds[i]:
                down[i] |= down[a]
        self._set_down(down)

    @classmethod
    def from_down_masks(cls, down: list[int]) -> "Poset":
        p = cls.__new__(cls)
        p.size = len(down)
        p._set_down(list(down))
        return p

    @classmethod
    def from_leq(cls, size: int, leq: Callable[[int, int], bool]) -> "Poset":
        down = []
        for j in range(size):
            m = 1 << j
            for i in range(size):
                if i != j and leq(i, j):
                    m |= 1 << i
            down.append(m)
        p = cls.from_down_masks(down)
        p.check()
        return p

    @classmethod
    def antichain(cls, size: int) -> "Poset":
        return cls(size)

    def _set_down(self, down: list[int]) -> None:
        self.down = down
        up = [1 << i for i in range(self.size)]
        for j, m in enumerate(down):
            for i in mask_members(m & ~(1 << j)):
                up[i] |= 1 << j
        self.up = up
        self._covers = None

    def check(self) -> None:
        """Assert reflexivity, antisymmetry and transitivity exhaustively."""
        for i in range(self.size):
            if not self.down[i] >> i & 1:
                raise ValueError("not reflexive")
            for j in mask_members(self.down[i]):
                if j != i and self.down[j] >> i & 1:
                    raise ValueError("not antisymmetric")
                if self.down[j] & ~self.down[i]:
                    raise ValueError("not transitive")

    def leq(self, i: int, j: int) -> bool:
        return bool(self.down[j] >> i & 1)

    def less(self, i: int, j: int) -> bool:
        return i != j and self.leq(i, j)

    @property
    def covers(self) -> list[tuple[int, int]]:
        """Hasse diagram edges (i, j) with i covered by j."""
        if self._covers is None:
            out = []
            for j in range(self.size):
                below = self.down[j] & ~(1 << j)
                for i in mask_members(below):
                    if not (below & self.up[i] & ~(1 << i)):
                        out.append((i, j))
            self._covers = out
        return self._covers

    def down_mask(self, m: int) -> int:
        out = 0
        down = self.down
        while m:
            low = m & -m
            out |= down[low.bit_length() - 1]
            m ^= low
        return out

    def up_mask(self, m: int) -> int:
        out = 0
        up = self.up
        while m:
            low = m & -m
            out |= up[low.bit_length() - 1]
            m ^= low
        return out

    def maximal_mask(self, m: int) -> int:
        out = 0
        rest = m
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            if not (self.up[i] & m & ~low):
                out |= low
            rest ^= low
        return out

    def down_closure(self, x: Iterable[int]) -> frozenset[int]:
        return from_mask(self.down_mask(to_mask(x)))

    def up_set_of(self, x: Iterable[int]) -> frozenset[int]:
        return from_mask(self.up_mask(to_mask(x)))

    def is_down_set(self, x: Iterable[int]) -> bool:
        m = to_mask(x)
        return self.down_mask(m) == m

    def is_up_set(self, x: Iterable[int]) -> bool:
        m = to_mask(x)
        return self.up_mask(m) == m

    def maximal_of(self, x: Iterable[int]) -> frozenset[int]:
        return from_mask(self.maximal_mask(to_mask(x)))

    def minimal_of(self, x: Iterable[int]) -> frozenset[int]:
        m = to_mask(x)
        return frozenset(i for i in mask_members(m) if not (self.down[i] & m & ~(1 << i)))

    def extend_with_top_antichain(self, count: int, mode: str = "above-maximals") -> "Poset":
        if count < 0:
            raise ValueError("count must be nonnegative")
        if mode not in ("above-maximals", "disjoint"):
            raise ValueError(f"unknown mode {mode!r}")
        k = self.size
        down = list(self.down)
        top = (1 << k) - 1 if mode == "above-maximals" else 0
        for t in range(count):
            down.append(top | 1 << (k + t))
        return Poset.from_down_masks(down)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.down == other.down

    def __repr__(self) -> str:
        return f"Poset(size={self.size}, covers={len(self.covers)})"


def down_closure(p: Poset, x: Iterable[int]) -> frozenset[int]:
    return p.down_closure(x)


def is_down_set(p: Poset, x: Iterable[int]) -> bool:
    return p.is_down_set(x)


def maximal_of(p: Poset, x: Iterable[int]) -> frozenset[int]:
    return p.maximal_of(x)


def up_set_of(p: Poset, x: Iterable[int]) -> frozenset[int]:
    return p.up_set_of(x)


def extend_with_top_antichain(p: Poset, count: int, mode: str = "above-maximals") -> Poset:
    return p.extend_with_top_antichain(count, mode)
