"""Exact rational linear algebra on sparse matrices (sympy DomainMatrix over QQ)."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _qq(v) -> object:
    v = Fraction(v)
    return QQ(v.numerator, v.denominator)


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def sparse_matrix(entries: Mapping[tuple[int, int], Fraction], nrows: int, ncols: int) -> DomainMatrix:
    rows: dict[int, dict[int, object]] = {}
    for (i, j), v in entries.items():
        if v:
            rows.setdefault(i, {})[j] = _qq(v)
    return DomainMatrix(rows, (nrows, ncols), QQ)


def dense(rows: Sequence[Sequence]) -> DomainMatrix:
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    return sparse_matrix({(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v}, nrows, ncols)


def rank(M: DomainMatrix) -> int:
    if 0 in M.shape:
        return 0
    return M.rank()


def nullspace(M: DomainMatrix) -> list[list[Fraction]]:
    """Basis of ``{v : M v = 0}`` as lists of Fractions."""
    nrows, ncols = M.shape
    if ncols == 0:
        return []
    if nrows == 0:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    rref, pivots = M.to_field().rref()
    data = rref.to_list()
    pivots = list(pivots)
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -_frac(data[r][f])
        basis.append(v)
    return basis


def matmul(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    return A * B


def is_zero(M: DomainMatrix) -> bool:
    return 0 in M.shape or M.is_zero_matrix
