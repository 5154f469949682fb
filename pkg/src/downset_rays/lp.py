"""Exact primal simplex with Bland's rule on an integer-pivoting tableau.

The tableau is kept as det(B) * B^-1 [A | I | b] with a common positive
denominator, so all entries stay integers and every division is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class Unbounded(Exception):
    pass


@dataclass
class LPResult:
    value: Fraction
    x: list[Fraction]
    pivots: int


def maximize(c: Sequence[int], a: Sequence[Sequence[int]], b: Sequence[int]) -> LPResult:
    """max c.x  subject to  a x <= b, x >= 0, for integer data with b >= 0."""
    n = len(c)
    m = len(a)
    if any(bi < 0 for bi in b):
        raise ValueError("right-hand side must be nonnegative")
    width = n + m + 1
    rhs = n + m
    tab = [[-int(cj) for cj in c] + [0] * (m + 1)]
    for i, row in enumerate(a):
        if len(row) != n:
            raise ValueError("constraint row has wrong length")
        r = [int(x) for x in row] + [0] * (m + 1)
        r[n + i] = 1
        r[rhs] = int(b[i])
        tab.append(r)
    basis = [n + i for i in range(m)]
    den = 1
    pivots = 0
    while True:
        obj = tab[0]
        col = -1
        for j in range(rhs):
            if obj[j] < 0:
                col = j
                break
        if col < 0:
            break
        row = -1
        for i in range(1, m + 1):
            aic = tab[i][col]
            if aic <= 0:
                continue
            if row < 0:
                row = i
                continue
            # compare tab[i][rhs]/aic with tab[row][rhs]/tab[row][col]
            lhs = tab[i][rhs] * tab[row][col]
            cur = tab[row][rhs] * aic
            if lhs < cur or (lhs == cur and basis[i - 1] < basis[row - 1]):
                row = i
        if row < 0:
            raise Unbounded()
        prow = tab[row]
        p = prow[col]
        for i in range(m + 1):
            if i == row:
                continue
            ti = tab[i]
            f = ti[col]
            if f == 0:
                tab[i] = [(x * p) // den for x in ti]
            else:
                tab[i] = [(x * p - f * y) // den for x, y in zip(ti, prow)]
        den = p
        basis[row - 1] = col
        pivots += 1
    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = Fraction(tab[i + 1][rhs], den)
    return LPResult(Fraction(tab[0][rhs], den), x, pivots)
