"""Exact polyhedral cone geometry for C = {v : E_i(v) >= 0 for all i}."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import lp
from .errors import GeometryError
from .linalg import (
    Subspace,
    as_array,
    integer_row,
    matmul,
    nullspace_basis,
    primitive,
    rank,
    to_fraction,
)


class InequalitySystem:
    """Dual vectors E_0..E_{k-1} of a full-dimensional pointed cone.

    ``interior_point`` is an optional witness with every E_i strictly positive;
    without it full-dimensionality is certified by an exact LP.
    """

    def __init__(
        self,
        ambient_dim: int,
        duals: Sequence[Sequence],
        redundant: Sequence[bool] | None = None,
        *,
        interior_point: Sequence | None = None,
        validate: bool = True,
    ):
        self.ambient_dim = ambient_dim
        self.duals = tuple(tuple(to_fraction(x) for x in d) for d in duals)
        for d in self.duals:
            if len(d) != ambient_dim:
                raise ValueError(f"dual of length {len(d)} in a {ambient_dim}-dim space")
        if redundant is None:
            redundant = [False] * len(self.duals)
        if len(redundant) != len(self.duals):
            raise ValueError("one redundant flag per dual is required")
        self.redundant = tuple(bool(r) for r in redundant)
        self.int_duals = tuple(integer_row(d) for d in self.duals)
        self.matrix = as_array(self.int_duals, ambient_dim)
        self._exact = None
        if all(x.denominator == 1 for d in self.duals for x in d):
            self._exact = as_array([[int(x) for x in d] for d in self.duals], ambient_dim)
        if validate:
            self.validate(interior_point)

    @property
    def size(self) -> int:
        return len(self.duals)

    def validate(self, interior_point=None) -> None:
        for i, d in enumerate(self.int_duals):
            if not any(d):
                raise GeometryError(f"dual {i} is the zero vector")
        if rank(self.int_duals, self.ambient_dim) != self.ambient_dim:
            raise GeometryError("cone is not pointed (duals do not span the dual space)")
        if interior_point is not None:
            if any(v <= 0 for v in self.values(interior_point)):
                raise GeometryError("claimed interior point is not strictly interior")
        elif face_closure(self, ()):
            raise GeometryError("cone is not full-dimensional")

    def values(self, v: Sequence) -> list:
        """E_i(v) for every i, exactly."""
        if len(v) != self.ambient_dim:
            raise ValueError("vector length does not match the ambient dimension")
        if self._exact is not None and all(isinstance(x, (int, np.integer)) for x in v):
            col = as_array([[int(x) for x in v]], self.ambient_dim).T
            return [int(s) for s in matmul(self._exact, col)[:, 0].tolist()]
        fv = [to_fraction(x) for x in v]
        return [sum((a * b for a, b in zip(d, fv)), Fraction(0)) for d in self.duals]

    def saturation(self, v: Sequence) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.values(v)) if x == 0)

    def __repr__(self) -> str:
        return f"InequalitySystem(n={self.ambient_dim}, k={self.size}, redundant={sum(self.redundant)})"


@dataclass(frozen=True, order=True)
class Ray:
    """A ray generator scaled to a primitive integer vector."""

    generator: tuple[int, ...]

    def __post_init__(self):
        if not any(self.generator):
            raise ValueError("a ray generator must be nonzero")

    @classmethod
    def from_vector(cls, v: Iterable) -> "Ray":
        return cls(integer_row(v))

    def __len__(self) -> int:
        return len(self.generator)

    def __iter__(self):
        return iter(self.generator)


def _subspace(sys: InequalitySystem, x: Iterable[int]) -> Subspace:
    x = sorted(x)
    if not x:
        return Subspace.full(sys.ambient_dim)
    return Subspace.full(sys.ambient_dim).restrict(sys.matrix[x])


def linear_closure(sys: InequalitySystem, x: Iterable[int], subspace: Subspace | None = None) -> frozenset[int]:
    v = subspace if subspace is not None else _subspace(sys, x)
    return frozenset(np.flatnonzero(v.vanishing(sys.matrix)).tolist()) | frozenset(x)


def face_closure(sys: InequalitySystem, x: Iterable[int], subspace: Subspace | None = None) -> frozenset[int]:
    """Indices whose dual vanishes on the whole face C ∩ V_x.

    For each undecided i we maximize E_i over the face with E_i <= 1; i is in
    the closure iff the optimum is 0.  An optimal point with E_j > 0 also
    rules out every such j without a separate LP.
    """
    x = frozenset(x)
    space = subspace if subspace is not None else _subspace(sys, x)
    k = sys.size
    if space.dim == 0:
        return frozenset(range(k))
    coords = space.coordinates(sys.matrix).tolist()
    closed = set(x)
    cands = []
    for i in range(k):
        if i in closed:
            continue
        if not any(coords[i]):
            closed.add(i)
        else:
            cands.append(i)
    d = space.dim
    cons = [[-c for c in coords[j]] + list(coords[j]) for j in cands]
    alive: set[int] = set()
    for i in cands:
        if i in alive:
            continue
        ci = list(coords[i]) + [-c for c in coords[i]]
        res = lp.maximize(ci, cons + [ci], [0] * len(cons) + [1])
        if res.value == 0:
            closed.add(i)
            continue
        w = [res.x[t] - res.x[d + t] for t in range(d)]
        for j in cands:
            if sum(a * b for a, b in zip(coords[j], w)) > 0:
                alive.add(j)
    return frozenset(closed)


def subspace_dim(sys: InequalitySystem, x: Iterable[int]) -> int:
    x = list(x)
    return sys.ambient_dim - rank([sys.int_duals[i] for i in x], sys.ambient_dim)


@dataclass
class ReducedSystem:
    """Duals of ``keep`` written in a basis of V_x.

    ``index_map[t]`` is the original index of reduced dual t; ``dropped``
    holds the indices of ``keep`` whose reduction vanished.  Vectors w in the
    reduced space lift to w @ basis.
    """

    system: InequalitySystem
    basis: Subspace
    index_map: list[int]
    dropped: list[int]

    def lift(self, w: Sequence) -> tuple:
        rows = self.basis.rows
        n = self.basis.ambient
        fw = [to_fraction(a) for a in w]
        return tuple(sum((fw[t] * rows[t][j] for t in range(len(rows))), Fraction(0)) for j in range(n))


def reduced_system(
    sys: InequalitySystem, x: Iterable[int], keep: Iterable[int], subspace: Subspace | None = None
) -> ReducedSystem:
    x = frozenset(x)
    keep = sorted(keep)
    if x & set(keep):
        raise ValueError("keep must be disjoint from x")
    space = subspace if subspace is not None else _subspace(sys, x)
    coords = space.coordinates(sys.matrix[keep]).tolist() if keep else []
    duals, imap, dropped = [], [], []
    for i, row in zip(keep, coords):
        if any(row):
            duals.append(row)
            imap.append(i)
        else:
            dropped.append(i)
    red = InequalitySystem(space.dim, duals, validate=False)
    return ReducedSystem(red, space, imap, dropped)


def rank_deficit(sys: InequalitySystem, x: Iterable[int], u: Iterable[int], subspace: Subspace | None = None) -> int:
    x = frozenset(x)
    u = frozenset(u)
    space = subspace if subspace is not None else _subspace(sys, x)
    rest = [i for i in range(sys.size) if i not in x and i not in u]
    if not rest or space.dim == 0:
        return space.dim
    coords = space.coordinates(sys.matrix[rest]).tolist()
    return space.dim - rank(coords, space.dim)


def satisfies_all(sys: InequalitySystem, v: Sequence) -> tuple[bool, list[int]]:
    violated = [i for i, x in enumerate(sys.values(v)) if x < 0]
    return (not violated, violated)


def is_extreme_ray(sys: InequalitySystem, v: Sequence) -> bool:
    ok, _ = satisfies_all(sys, v)
    if not ok:
        raise ValueError("is_extreme_ray requires a vector inside the cone")
    if not any(to_fraction(a) for a in v):
        return False
    z = sys.saturation(v)
    return rank([sys.int_duals[i] for i in z], sys.ambient_dim) == sys.ambient_dim - 1


def _popcount(m: int) -> int:
    return bin(m).count("1")


def double_description(sys: InequalitySystem) -> list[Ray]:
    """All extreme rays of a pointed cone, canonically normalized and sorted."""
    n = sys.ambient_dim
    rows: list[tuple[int, ...]] = []
    seen = set()
    for d in sys.int_duals:
        if any(d) and d not in seen:
            seen.add(d)
            rows.append(d)
    if n == 0:
        return []
    if rank(rows, n) != n:
        raise GeometryError("double description needs a pointed cone")
    # greedy choice of n independent rows for the initial simplicial cone
    chosen: list[int] = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in chosen] + [r], n) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == n:
                break
    order = chosen + [i for i in range(len(rows)) if i not in set(chosen)]
    rows = [rows[i] for i in order]

    def ev(r, v):
        return sum(a * b for a, b in zip(r, v))

    rays: list[tuple[tuple[int, ...], int]] = []
    for t in range(n):
        others = [rows[j] for j in range(n) if j != t]
        (vec,) = nullspace_basis(others, n)
        if ev(rows[t], vec) < 0:
            vec = tuple(-a for a in vec)
        zmask = ((1 << n) - 1) & ~(1 << t)
        rays.append((vec, zmask))
    for idx in range(n, len(rows)):
        e = rows[idx]
        vals = [ev(e, v) for v, _ in rays]
        pos = [i for i, s in enumerate(vals) if s > 0]
        neg = [i for i, s in enumerate(vals) if s < 0]
        zer = [i for i, s in enumerate(vals) if s == 0]
        bit = 1 << idx
        new: list[tuple[tuple[int, ...], int]] = []
        masks = [z for _, z in rays]
        for p in pos:
            vp, zp = rays[p]
            for q in neg:
                vq, zq = rays[q]
                common = zp & zq
                if _popcount(common) < n - 2:
                    continue
                adjacent = True
                for r, zr in enumerate(masks):
                    if r != p and r != q and common & zr == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                a, b = vals[p], -vals[q]
                vec = primitive(b * x + a * y for x, y in zip(vp, vq))
                new.append((vec, common | bit))
        rays = [rays[i] for i in pos] + [(rays[i][0], rays[i][1] | bit) for i in zer] + new
    out = sorted({Ray(primitive(v)) for v, _ in rays})
    return out


def inject_redundant(sys: InequalitySystem, faces: Sequence[Iterable[int]], sigma=1) -> InequalitySystem:
    """Append sigma * sum_{j in face} E_j for every face, flagged redundant."""
    sigma = to_fraction(sigma)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    duals = list(sys.duals)
    flags = list(sys.redundant)
    for face in faces:
        face = sorted(face)
        if not face:
            raise ValueError("faces must be nonempty")
        duals.append(tuple(sigma * sum((sys.duals[j][c] for j in face), Fraction(0)) for c in range(sys.ambient_dim)))
        flags.append(True)
    # the cone is unchanged, so the validation of sys carries over
    return InequalitySystem(sys.ambient_dim, duals, flags, validate=False)
