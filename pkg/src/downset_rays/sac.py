"""The subadditivity cone: MI instances, the MI-poset and party symmetry.

Entropy coordinates are indexed by nonempty J ⊆ {1..N} through the bitmask
convention ``index(J) = sum(2**(l-1) for l in J) - 1``.  Party 0 is the
purifier: any term S_X with 0 in X is rewritten as S of the complement of X
in {0..N}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .permsym import PermGroup, Permutation
from .polycone import InequalitySystem
from .poset import Poset


def _party_key(p: int) -> tuple[bool, int]:
    # the purifier is written last, as in I(1:20)
    return (p == 0, p)


def _sorted_parties(x: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(x, key=_party_key))


@dataclass(frozen=True)
class PartySystem:
    n_parties: int

    def __post_init__(self):
        if self.n_parties < 2:
            raise InputError("at least two parties are required")

    @property
    def ambient_dim(self) -> int:
        return 2**self.n_parties - 1

    @property
    def parties(self) -> range:
        return range(1, self.n_parties + 1)

    @property
    def everyone(self) -> frozenset[int]:
        return frozenset(range(self.n_parties + 1))

    def coord(self, subset: Iterable[int]) -> int:
        m = 0
        for p in subset:
            if not 1 <= p <= self.n_parties:
                raise ValueError(f"party {p} is not a coordinate party")
            m |= 1 << (p - 1)
        if m == 0:
            raise ValueError("empty subset has no coordinate")
        return m - 1

    def subset(self, index: int) -> frozenset[int]:
        m = index + 1
        return frozenset(p for p in self.parties if m >> (p - 1) & 1)

    def term(self, x: Iterable[int]) -> int | None:
        """Coordinate of S_X after purification, or None when S_X = 0."""
        x = frozenset(x)
        if 0 in x:
            x = self.everyone - x
        if not x:
            return None
        return self.coord(x)

    @cached_property
    def presentation_order(self) -> list[int]:
        """Coordinates by cardinality, then lexicographically."""
        out = []
        for size in range(1, self.n_parties + 1):
            for c in itertools.combinations(self.parties, size):
                out.append(self.coord(c))
        return out

    def group_sizes(self) -> list[int]:
        return [comb(self.n_parties, s) for s in range(1, self.n_parties + 1)]

    def to_presentation(self, v: Sequence) -> list:
        return [v[i] for i in self.presentation_order]

    def from_presentation(self, seq: Sequence) -> tuple:
        if len(seq) != self.ambient_dim:
            raise InputError(f"expected {self.ambient_dim} entries for N={self.n_parties}, got {len(seq)}")
        out = [None] * self.ambient_dim
        for val, i in zip(seq, self.presentation_order):
            out[i] = val
        return tuple(out)

    def coord_label(self, index: int) -> str:
        return "".join(str(p) for p in sorted(self.subset(index)))


@dataclass(frozen=True, order=True)
class MIInstance:
    """I(left:right) in canonical orientation."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    @classmethod
    def make(cls, j: Iterable[int], k: Iterable[int]) -> "MIInstance":
        j, k = frozenset(j), frozenset(k)
        if not j or not k:
            raise ValueError("MI arguments must be nonempty")
        if j & k:
            raise ValueError("MI arguments must be disjoint")
        a, b = _sorted_parties(j), _sorted_parties(k)
        ka, kb = [_party_key(p) for p in a], [_party_key(p) for p in b]
        if kb < ka:
            a, b = b, a
        return cls(a, b)

    @classmethod
    def parse(cls, text: str) -> "MIInstance":
        s = text.strip()
        if s.startswith("I(") and s.endswith(")"):
            s = s[2:-1]
        if s.count(":") != 1:
            raise ValueError(f"cannot parse MI instance {text!r}")
        a, b = s.split(":")
        return cls.make((int(c) for c in a.strip()), (int(c) for c in b.strip()))

    @property
    def size(self) -> int:
        return len(self.left) + len(self.right)

    def image(self, perm: Sequence[int]) -> "MIInstance":
        return MIInstance.make((perm[p] for p in self.left), (perm[p] for p in self.right))

    def leq(self, other: "MIInstance") -> bool:
        a, b = set(self.left), set(self.right)
        c, d = set(other.left), set(other.right)
        return (a <= c and b <= d) or (a <= d and b <= c)

    def __str__(self) -> str:
        return "I(" + "".join(map(str, self.left)) + ":" + "".join(map(str, self.right)) + ")"


def stirling2_3(n: int) -> int:
    """Stirling number of the second kind {n over 3}."""
    if n < 3:
        return 0
    return (3**n - 3 * 2**n + 3) // 6


def enumerate_mi_instances(ps: PartySystem) -> list[MIInstance]:
    """All MI instances, sorted by |J|+|K| and then by canonical encoding."""
    found = set()
    parties = sorted(ps.everyone)
    for labels in itertools.product((0, 1, 2), repeat=len(parties)):
        j = [p for p, t in zip(parties, labels) if t == 1]
        k = [p for p, t in zip(parties, labels) if t == 2]
        if j and k:
            found.add(MIInstance.make(j, k))
    return sorted(found, key=lambda m: (m.size, [_party_key(p) for p in m.left], [_party_key(p) for p in m.right]))


def mi_dual_vector(ps: PartySystem, m: MIInstance) -> tuple[int, ...]:
    v = [0] * ps.ambient_dim
    for x, s in ((m.left, 1), (m.right, 1), (m.left + m.right, -1)):
        t = ps.term(x)
        if t is not None:
            v[t] += s
    return tuple(v)


def build_mi_poset(ps: PartySystem, instances: Sequence[MIInstance] | None = None) -> Poset:
    inst = instances if instances is not None else enumerate_mi_instances(ps)
    sets = [(frozenset(m.left), frozenset(m.right)) for m in inst]
    down = []
    for j, (c, d) in enumerate(sets):
        mask = 0
        for i, (a, b) in enumerate(sets):
            if (a <= c and b <= d) or (a <= d and b <= c):
                mask |= 1 << i
        down.append(mask)
    return Poset.from_down_masks(down)


@dataclass
class PartyAction:
    """Sym(N+1) acting on MI instances and on entropy coordinates.

    Row t of ``group.elements`` is the instance permutation induced by
    ``party_perms[t]``; row t of ``coord_perms`` sends coordinate J to the
    coordinate of its (purified) image.
    """

    ps: PartySystem
    group: PermGroup
    party_perms: list[tuple[int, ...]]
    coord_perms: np.ndarray

    def act_on_vector(self, t: int, v: Sequence) -> tuple:
        out = [None] * len(v)
        for j, c in enumerate(self.coord_perms[t].tolist()):
            out[c] = v[j]
        return tuple(out)


def party_group(ps: PartySystem, instances: Sequence[MIInstance] | None = None) -> PartyAction:
    inst = list(instances if instances is not None else enumerate_mi_instances(ps))
    where = {m: i for i, m in enumerate(inst)}
    n = ps.n_parties
    perms = list(itertools.permutations(range(n + 1)))
    rows = np.empty((len(perms), len(inst)), dtype=np.int32)
    coords = np.empty((len(perms), ps.ambient_dim), dtype=np.int32)
    for t, pi in enumerate(perms):
        rows[t] = [where[m.image(pi)] for m in inst]
        coords[t] = [ps.term(pi[p] for p in ps.subset(c)) for c in range(ps.ambient_dim)]
    gens = []
    for a in range(n):
        pi = list(range(n + 1))
        pi[a], pi[a + 1] = pi[a + 1], pi[a]
        gens.append(Permutation(tuple(where[m.image(pi)] for m in inst)))
    group = PermGroup(len(inst), gens, _elements=rows)
    return PartyAction(ps, group, perms, coords)


def pairwise_indices(instances: Sequence[MIInstance]) -> frozenset[int]:
    return frozenset(i for i, m in enumerate(instances) if m.size == 2)


def bell_face_downset(ps: PartySystem, instances: Sequence[MIInstance] | None = None) -> frozenset[int]:
    inst = instances if instances is not None else enumerate_mi_instances(ps)
    return pairwise_indices(inst)


def maximal_indices(ps: PartySystem, instances: Sequence[MIInstance]) -> frozenset[int]:
    return frozenset(i for i, m in enumerate(instances) if m.size == ps.n_parties + 1)


def genuine_excluded_upset(ps: PartySystem, instances: Sequence[MIInstance] | None = None) -> frozenset[int]:
    inst = instances if instances is not None else enumerate_mi_instances(ps)
    return frozenset(i for i, m in enumerate(inst) if m.size >= ps.n_parties)


def fstar_dim(ps: PartySystem) -> int:
    n = ps.n_parties
    return 2**n - comb(n + 1, 2) - 1


def facet_count(ps: PartySystem) -> int:
    n = ps.n_parties
    return stirling2_3(n + 2) - 2**n + 1


def interior_point(ps: PartySystem) -> tuple[int, ...]:
    """S_J = |J| (N+1-|J|): every MI instance is 2|J||K| > 0 here."""
    n = ps.n_parties
    return tuple(len(ps.subset(c)) * (n + 1 - len(ps.subset(c))) for c in range(ps.ambient_dim))


@dataclass
class SacBuild:
    ps: PartySystem
    mode: str
    instances: list[MIInstance]
    system: InequalitySystem
    poset: Poset
    action: PartyAction
    initial_down: frozenset[int]
    initial_excluded: frozenset[int]
    index: dict = field(default_factory=dict)

    @property
    def group(self) -> PermGroup:
        return self.action.group

    def lookup(self, text_or_instance) -> int:
        m = text_or_instance
        if isinstance(m, str):
            m = MIInstance.parse(m)
        return self.index[m]

    def describe(self, x: Iterable[int]) -> list[str]:
        return [str(self.instances[i]) for i in sorted(x)]


def build_sac_system(ps: PartySystem, mode: str = "genuine") -> SacBuild:
    if mode not in ("genuine", "full"):
        raise InputError(f"unknown mode {mode!r}")
    inst = enumerate_mi_instances(ps)
    duals = [mi_dual_vector(ps, m) for m in inst]
    top = maximal_indices(ps, inst)
    flags = [i in top for i in range(len(inst))]
    system = InequalitySystem(ps.ambient_dim, duals, flags, interior_point=interior_point(ps))
    poset = build_mi_poset(ps, inst)
    action = party_group(ps, inst)
    d0 = bell_face_downset(ps, inst)
    u0 = genuine_excluded_upset(ps, inst) if mode == "genuine" else top
    return SacBuild(ps, mode, inst, system, poset, action, d0, u0, {m: i for i, m in enumerate(inst)})


# strong subadditivity -------------------------------------------------------


def _ssa_functionals(ps: PartySystem) -> np.ndarray:
    """Distinct nonzero functionals S_IK + S_JK - S_K - S_IJK."""
    found = set()
    parties = sorted(ps.everyone)
    for labels in itertools.product((0, 1, 2, 3), repeat=len(parties)):
        i = [p for p, t in zip(parties, labels) if t == 1]
        j = [p for p, t in zip(parties, labels) if t == 2]
        k = [p for p, t in zip(parties, labels) if t == 3]
        if not (i and j and k):
            continue
        v = [0] * ps.ambient_dim
        for x, s in ((i + k, 1), (j + k, 1), (k, -1), (i + j + k, -1)):
            t = ps.term(x)
            if t is not None:
                v[t] += s
        if any(v):
            found.add(tuple(v))
    return np.array(sorted(found), dtype=np.int64).reshape(len(found), ps.ambient_dim)


_SSA_CACHE: dict[int, np.ndarray] = {}


def ssa_functionals(ps: PartySystem) -> np.ndarray:
    if ps.n_parties not in _SSA_CACHE:
        _SSA_CACHE[ps.n_parties] = _ssa_functionals(ps)
    return _SSA_CACHE[ps.n_parties]


def _evaluate(rows: np.ndarray, v: Sequence) -> list:
    if all(isinstance(x, (int, np.integer)) for x in v):
        vals = rows.astype(object) @ np.array([int(x) for x in v], dtype=object)
        return list(vals)
    fv = [Fraction(x) for x in v]
    return [sum((int(a) * b for a, b in zip(row, fv)), Fraction(0)) for row in rows.tolist()]


def ssa_check(ps: PartySystem, v: Sequence) -> tuple[bool, int]:
    """True iff every SSA instance holds; also the number of violated instances."""
    if len(v) != ps.ambient_dim:
        raise InputError("vector length does not match the party number")
    bad = sum(1 for x in _evaluate(ssa_functionals(ps), v) if x < 0)
    return bad == 0, bad


def sa_check(ps: PartySystem, v: Sequence) -> tuple[bool, int]:
    if len(v) != ps.ambient_dim:
        raise InputError("vector length does not match the party number")
    inst = enumerate_mi_instances(ps)
    rows = np.array([mi_dual_vector(ps, m) for m in inst], dtype=np.int64)
    bad = sum(1 for x in _evaluate(rows, v) if x < 0)
    return bad == 0, bad


def format_entropy_vector(ps: PartySystem, v: Sequence) -> str:
    """Presentation order, cardinality groups separated by semicolons."""
    pres = [str(Fraction(x)) for x in ps.to_presentation(v)]
    out, pos = [], 0
    for size in ps.group_sizes():
        out.append(" ".join(pres[pos : pos + size]))
        pos += size
    return "; ".join(out)


def parse_entropy_vector(text: str, ps: PartySystem | None = None) -> tuple[PartySystem, tuple]:
    s = text.strip().strip("{}()[]")
    values = [Fraction(t) for t in s.replace(";", " ").replace(",", " ").split()]
    d = len(values)
    n = (d + 1).bit_length() - 1
    if 2**n - 1 != d:
        raise InputError(f"{d} entries is not 2^N - 1 for any N")
    if ps is None:
        ps = PartySystem(n)
    elif ps.n_parties != n:
        raise InputError(f"vector has arity N={n}, expected N={ps.n_parties}")
    vec = ps.from_presentation([int(x) if x.denominator == 1 else x for x in values])
    return ps, vec


@dataclass
class InequalityReport:
    saturated: int
    violated: int
    by_tag: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violated == 0


def evaluate_inequalities(
    duals: Sequence[Sequence], v: Sequence, tags: Sequence[str | None] | None = None
) -> InequalityReport:
    """Count inequalities E.v >= 0 that are saturated and violated, overall and per tag."""
    sat = bad = 0
    per: dict[str, list[int]] = {}
    for i, d in enumerate(duals):
        if len(d) != len(v):
            raise InputError(f"inequality {i} has {len(d)} entries, the vector has {len(v)}")
        x = sum((Fraction(a) * Fraction(b) for a, b in zip(d, v)), Fraction(0))
        tag = tags[i] if tags and tags[i] else None
        cell = per.setdefault(tag, [0, 0]) if tag else None
        if x == 0:
            sat += 1
            if cell:
                cell[0] += 1
        elif x < 0:
            bad += 1
            if cell:
                cell[1] += 1
    return InequalityReport(sat, bad, {k: (a, b) for k, (a, b) in sorted(per.items())})
