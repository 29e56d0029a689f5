"""Thin exact-arithmetic layer over sympy's DomainMatrix.

Everything downstream stores integer matrices as DomainMatrix over ZZ and
only converts to plain lists at the serialization boundary.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

__all__ = [
    "DomainMatrix", "ZZ", "QQ", "zz", "qq", "zeros", "eye", "rows_of", "mpow",
    "rank", "column_basis", "solve_left", "nullspace", "snf", "charpoly",
    "is_nilpotent", "block_diag", "trace", "to_fraction",
]


def zz(rows: Sequence[Sequence[int]], shape: tuple[int, int] | None = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    if shape[0] == 0 or shape[1] == 0:
        return DomainMatrix.zeros(shape, ZZ)
    return DomainMatrix([[ZZ(int(x)) for x in r] for r in rows], shape, ZZ)


def qq(rows, shape=None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    if shape[0] == 0 or shape[1] == 0:
        return DomainMatrix.zeros(shape, QQ)
    return DomainMatrix([[QQ(Fraction(x).numerator, Fraction(x).denominator) for x in r]
                         for r in rows], shape, QQ)


def zeros(n: int, m: int, dom=ZZ) -> DomainMatrix:
    return DomainMatrix.zeros((n, m), dom)


def eye(n: int, dom=ZZ) -> DomainMatrix:
    return DomainMatrix.eye(n, dom) if n else DomainMatrix.zeros((0, 0), dom)


def to_fraction(x) -> Fraction:
    if hasattr(x, "denominator"):
        num, den = x.numerator, x.denominator
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        return Fraction(int(num), int(den))
    return Fraction(int(x))


def rows_of(M: DomainMatrix) -> list[list]:
    """Plain python entries: ints over ZZ, Fractions over QQ."""
    n, m = M.shape
    if n == 0 or m == 0:
        return [[] for _ in range(n)]
    if M.domain == ZZ:
        return [[int(x) for x in r] for r in M.to_list()]
    return [[to_fraction(x) for x in r] for r in M.to_list()]


def mpow(M: DomainMatrix, k: int) -> DomainMatrix:
    n = M.shape[0]
    if k == 0 or n == 0:
        return eye(n, M.domain)
    return M ** k


def rank(M: DomainMatrix) -> int:
    if 0 in M.shape:
        return 0
    return M.convert_to(QQ).rank()


def column_basis(M: DomainMatrix) -> DomainMatrix:
    """Pivot columns of M; a basis of its column space built from M's own columns."""
    n, m = M.shape
    if n == 0 or m == 0:
        return zeros(n, 0, M.domain)
    _, piv = M.convert_to(QQ).rref()
    if not piv:
        return zeros(n, 0, M.domain)
    return M.extract(list(range(n)), list(piv))


def solve_left(B: DomainMatrix, X: DomainMatrix) -> DomainMatrix:
    """Return Y over QQ with B*Y == X, for B of full column rank; raise if none."""
    n, r = B.shape
    k = X.shape[1]
    if r == 0:
        if X.convert_to(QQ).is_zero_matrix:
            return zeros(0, k, QQ)
        raise ValueError("no solution")
    if k == 0:
        return zeros(r, 0, QQ)
    aug = B.convert_to(QQ).hstack(X.convert_to(QQ))
    R, piv = aug.rref()
    if any(p >= r for p in piv):
        raise ValueError("no solution")
    return R.extract(list(range(r)), list(range(r, r + k)))


def nullspace(M: DomainMatrix) -> DomainMatrix:
    """Rational kernel basis, as columns."""
    n, m = M.shape
    if m == 0:
        return zeros(0, 0, QQ)
    if n == 0:
        return eye(m, QQ)
    N = M.convert_to(QQ).nullspace()
    if N.shape[0] == 0:
        return zeros(m, 0, QQ)
    return N.transpose()


def snf(M: DomainMatrix):
    """(S, U, V) with S = U*M*V, U and V unimodular, S in Smith form."""
    n, m = M.shape
    if n == 0 or m == 0:
        return M, eye(n), eye(m)
    return smith_normal_decomp(M.convert_to(ZZ))


def charpoly(M: DomainMatrix) -> list[int]:
    """Monic characteristic polynomial, highest degree first."""
    if M.shape[0] == 0:
        return [1]
    out = []
    for c in M.charpoly():
        f = to_fraction(c)
        if f.denominator != 1:
            raise ValueError("non-integral characteristic polynomial")
        out.append(int(f))
    return out


def is_nilpotent(M: DomainMatrix) -> bool:
    n = M.shape[0]
    return n == 0 or mpow(M, n).is_zero_matrix


def block_diag(blocks: Iterable[DomainMatrix], dom=ZZ) -> DomainMatrix:
    blocks = list(blocks)
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = zeros(n, m, dom).to_dok()
    i = j = 0
    for b in blocks:
        for (a, c), v in b.convert_to(dom).to_dok().items():
            out[(i + a, j + c)] = v
        i += b.shape[0]
        j += b.shape[1]
    return DomainMatrix.from_dok(out, (n, m), dom)


def trace(M: DomainMatrix):
    return sum((M[i, i].element for i in range(M.shape[0])), M.domain.zero)
