"""Small exact linear algebra over the rationals.

Matrices are tuples of row tuples of ``Fraction``; vectors are tuples.
Everything here is deterministic and free of floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple
Matrix = tuple


def frac(x) -> Fraction:
    """Parse an int, Fraction or "p/q" string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    return Fraction(x)


def vec(xs: Iterable) -> Vector:
    return tuple(frac(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def zeros(n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def unit(n: int, i: int) -> Vector:
    return tuple(Fraction(int(j == i)) for j in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def add(u: Sequence, v: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(u, v))


def scale(c, v: Sequence) -> Vector:
    return tuple(c * x for x in v)


def is_zero(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def bilinear(B: Matrix, u: Sequence, v: Sequence) -> Fraction:
    """u^T B v."""
    return dot(u, matvec(B, v))


def rref(rows: Iterable[Sequence]) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form with zero rows dropped, and pivot columns."""
    a = [list(map(frac, r)) for r in rows]
    if not a:
        return (), ()
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return tuple(tuple(row) for row in a[:r]), tuple(pivots)


def rank(rows: Iterable[Sequence]) -> int:
    return len(rref(rows)[0])


def nullspace(a: Matrix, ncols: int | None = None) -> Matrix:
    """Basis of {x : a x = 0}, returned in reduced row echelon form."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    r, piv = rref(a) if a else ((), ())
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(r, piv):
            x[pc] = -row[f]
        basis.append(x)
    return rref(basis)[0] if basis else ()


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(map(frac, row)) + list(e) for row, e in zip(a, identity(n))]
    r, piv = rref(aug)
    if piv[:n] != tuple(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in r)


def solve_in_span(basis: Sequence[Sequence], v: Sequence) -> Vector | None:
    """Coefficients c with sum c_i basis_i = v, or None if v is not in the span."""
    if not basis:
        return () if is_zero(v) else None
    k = len(basis)
    cols = transpose(tuple(tuple(map(frac, b)) for b in basis))
    aug = [list(row) + [frac(x)] for row, x in zip(cols, v)]
    r, piv = rref(aug)
    if k in piv:
        return None
    c = [Fraction(0)] * k
    for row, pc in zip(r, piv):
        c[pc] = row[k]
    return tuple(c)


def span_contains(basis: Sequence[Sequence], v: Sequence) -> bool:
    return solve_in_span(basis, v) is not None


def intersection_dim(a: Sequence[Sequence], b: Sequence[Sequence]) -> int:
    return len(a) + len(b) - rank(list(a) + list(b)) if (a or b) else 0


def fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vec(v: Sequence) -> list[str]:
    return [fmt(frac(x)) for x in v]


def fmt_mat(a: Sequence[Sequence]) -> list[list[str]]:
    return [fmt_vec(r) for r in a]
