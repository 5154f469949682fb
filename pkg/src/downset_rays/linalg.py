"""Exact linear algebra over the rationals.

Every routine works on integer rows internally: rational rows are scaled by
the lcm of their denominators (which changes neither rank nor nullspace) and
elimination is fraction-free, with each updated row divided by the gcd of its
entries to keep coefficients small.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

Rational = Fraction
RatVector = tuple
RatMatrix = Sequence[Sequence]

_INT64_SAFE = 1 << 62


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"not an exact rational: {x!r}")


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if not s:
        raise ValueError("empty rational")
    if "." in s or "e" in s.lower():
        raise ValueError(f"decimal notation not accepted: {s!r}")
    return Fraction(s)


def format_rational(q) -> str:
    q = to_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def primitive(v: Iterable[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (sign kept)."""
    v = [int(x) for x in v]
    g = 0
    for x in v:
        g = gcd(g, x)
        if g == 1:
            return tuple(v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def integer_row(row: Iterable) -> tuple[int, ...]:
    """Positive rescaling of a rational row to a primitive integer row."""
    fr = [to_fraction(x) for x in row]
    den = 1
    for q in fr:
        den = lcm(den, q.denominator)
    return primitive(q.numerator * (den // q.denominator) for q in fr)


def _as_int_rows(m: RatMatrix) -> list[list[int]]:
    out = []
    for row in m:
        if all(isinstance(x, (int, np.integer)) for x in row):
            out.append([int(x) for x in row])
        else:
            out.append(list(integer_row(row)))
    return out


def _ncols(m: RatMatrix, ncols: int | None) -> int:
    widths = {len(r) for r in m}
    if len(widths) > 1:
        raise ValueError("ragged matrix")
    if widths:
        w = widths.pop()
        if ncols is not None and ncols != w:
            raise ValueError(f"expected {ncols} columns, got {w}")
        return w
    if ncols is None:
        return 0
    return ncols


def rref(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free reduced row echelon form of an integer matrix.

    Returns the nonzero rows and their pivot columns.  Each pivot is positive
    and every other row is zero in each pivot column.
    """
    rows = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        piv = -1
        best = 0
        for i in range(r, len(rows)):
            a = rows[i][c]
            if a and (piv < 0 or abs(a) < best):
                piv, best = i, abs(a)
                if best == 1:
                    break
        if piv < 0:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        if pr[c] < 0:
            pr = [-x for x in pr]
            rows[r] = pr
        p = pr[c]
        for i in range(len(rows)):
            a = rows[i][c]
            if i == r or not a:
                continue
            g = gcd(a, p)
            mi, mp = p // g, a // g
            rows[i] = list(primitive(mi * x - mp * y for x, y in zip(rows[i], pr)))
        pivots.append(c)
        r += 1
        tail = [row for row in rows[r:] if any(row)]
        rows[r:] = tail
    return rows[:r], pivots


def rank(m: RatMatrix, ncols: int | None = None) -> int:
    n = _ncols(m, ncols)
    return len(rref(_as_int_rows(m), n)[1])


def in_span(v: Sequence, m: RatMatrix) -> bool:
    n = len(v)
    _ncols(m, n)
    if not any(to_fraction(x) for x in v):
        return True
    return rank(list(m) + [v], n) == rank(m, n)


def nullspace_from_rref(rows: list[list[int]], pivots: list[int], ncols: int) -> list[tuple[int, ...]]:
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        scale = 1
        for row, c in zip(rows, pivots):
            if row[f]:
                scale = lcm(scale, row[c])
        x = [0] * ncols
        x[f] = scale
        for row, c in zip(rows, pivots):
            if row[f]:
                x[c] = -row[f] * (scale // row[c])
        basis.append(primitive(x))
    return basis


def nullspace_basis(m: RatMatrix, ncols: int | None = None) -> list[tuple[int, ...]]:
    """Integer basis of {v : m v = 0}, one vector per free column."""
    n = _ncols(m, ncols)
    rows, piv = rref(_as_int_rows(m), n)
    return nullspace_from_rref(rows, piv, n)


def solve_combination(v: Sequence, m: RatMatrix) -> list[Fraction] | None:
    """Coefficients c with sum_i c_i m_i = v, or None if v is not in the span."""
    k = len(m)
    n = len(v)
    _ncols(m, n)
    # columns of the system are the rows of m; augment with -v and look for a
    # nullspace vector whose last entry is nonzero
    cols = [[to_fraction(x) for x in row] for row in m] + [[-to_fraction(x) for x in v]]
    system = [[cols[j][i] for j in range(k + 1)] for i in range(n)]
    for vec in nullspace_basis(system, k + 1):
        if vec[k]:
            return [Fraction(vec[j], vec[k]) for j in range(k)]
    return None


def dot(u: Sequence, v: Sequence):
    return sum(to_fraction(a) * to_fraction(b) for a, b in zip(u, v))


def as_array(rows, ncols: int) -> np.ndarray:
    """Integer rows as an int64 array when that is overflow-safe, else object."""
    rows = [[int(x) for x in r] for r in rows]
    big = max((abs(x) for r in rows for x in r), default=0)
    if big < (1 << 31):
        return np.array(rows, dtype=np.int64).reshape(len(rows), ncols)
    arr = np.empty((len(rows), ncols), dtype=object)
    for i, r in enumerate(rows):
        arr[i, :] = r
    return arr


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer matrix product; falls back to Python ints on overflow risk."""
    if a.dtype == np.int64 and b.dtype == np.int64 and a.size and b.size:
        bound = int(np.abs(a).max()) * int(np.abs(b).max()) * max(a.shape[1], 1)
        if bound < _INT64_SAFE:
            return a @ b
    return a.astype(object) @ b.astype(object)


class Subspace:
    """A rational subspace of Q^n held by a canonical integer basis.

    The basis is the reduced row echelon form of any spanning set, each row
    scaled to a primitive integer vector, so equal subspaces have equal bases.
    """

    __slots__ = ("ambient", "rows", "pivots", "_array")

    def __init__(self, ambient: int, spanning: Iterable[Sequence[int]]):
        rows, piv = rref([list(map(int, r)) for r in spanning], ambient)
        self.ambient = ambient
        self.rows = [tuple(r) for r in rows]
        self.pivots = piv
        self._array = None

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def annihilated_by(cls, rows: RatMatrix, n: int) -> "Subspace":
        return cls(n, nullspace_basis(rows, n))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def array(self) -> np.ndarray:
        if self._array is None:
            self._array = as_array(self.rows, self.ambient)
        return self._array

    def coordinates(self, duals: np.ndarray) -> np.ndarray:
        """Values of each dual row on each basis vector: duals @ basis^T."""
        if self.dim == 0:
            return np.zeros((duals.shape[0], 0), dtype=np.int64)
        return matmul(duals, self.array.T)

    def vanishing(self, duals: np.ndarray) -> np.ndarray:
        """Boolean mask of the dual rows that vanish on the whole subspace."""
        if self.dim == 0:
            return np.ones(duals.shape[0], dtype=bool)
        return ~np.any(self.coordinates(duals) != 0, axis=1)

    def restrict(self, duals: np.ndarray) -> "Subspace":
        """The subspace of vectors here that the given dual rows annihilate."""
        if self.dim == 0 or duals.shape[0] == 0:
            return self
        coords = self.coordinates(duals)
        if not np.any(coords != 0):
            return self
        null = nullspace_basis(coords.tolist(), self.dim)
        if not null:
            return Subspace(self.ambient, [])
        combo = matmul(as_array(null, self.dim), self.array)
        return Subspace(self.ambient, combo.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.ambient == other.ambient and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.ambient, tuple(self.rows)))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"
