"""Abstract unital algebras over QQ and exact matrices over them.

An algebra handle exposes the ring operations plus ``try_invert``, which
may fail (returning None).  The provided instance is the full matrix
algebra QQ^{n x n}; evaluating expressions or realizations over it must
reproduce plain matrix evaluation, which the tests check.

Matrices over an algebra are plain nested lists.  Inversion is Gaussian
elimination with a first-invertible-pivot search; if no pivoting sequence
works we report failure without claiming the matrix is singular (over a
general algebra there is no determinant to certify non-invertibility).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Protocol, Sequence

from .linalg import Mat, Rat, SingularMatrixError, inverse


class AlgebraHandle(Protocol):
    zero: object
    one: object

    def add(self, a, b): ...
    def neg(self, a): ...
    def mul(self, a, b): ...
    def smul(self, c: Rat, a): ...
    def eq(self, a, b) -> bool: ...
    def try_invert(self, a): ...


class MatrixAlgebra:
    """QQ^{n x n} as a unital algebra; try_invert uses the exact inverse."""

    def __init__(self, n: int):
        self.n = n
        self.zero = Mat.zero(n, n)
        self.one = Mat.identity(n)

    def add(self, a: Mat, b: Mat) -> Mat:
        return a + b

    def neg(self, a: Mat) -> Mat:
        return -a

    def mul(self, a: Mat, b: Mat) -> Mat:
        return a * b

    def smul(self, c: Rat, a: Mat) -> Mat:
        return a.scale(Fraction(c))

    def eq(self, a: Mat, b: Mat) -> bool:
        return a == b

    def try_invert(self, a: Mat) -> Mat | None:
        try:
            return inverse(a)
        except SingularMatrixError:
            return None


# matrices over an algebra: list of rows of elements
AlgMat = list


def alg_mat_zero(alg: AlgebraHandle, rows: int, cols: int) -> AlgMat:
    return [[alg.zero for _ in range(cols)] for _ in range(rows)]


def alg_mat_eye(alg: AlgebraHandle, n: int) -> AlgMat:
    return [[alg.one if i == j else alg.zero for j in range(n)] for i in range(n)]


def alg_mat_from_scalar(alg: AlgebraHandle, m: Mat) -> AlgMat:
    """Embed a scalar matrix: entry p/q becomes (p/q) * 1_A."""
    return [[alg.smul(m.data[i][j], alg.one) for j in range(m.cols)]
            for i in range(m.rows)]


def alg_mat_add(alg: AlgebraHandle, a: AlgMat, b: AlgMat) -> AlgMat:
    return [[alg.add(x, y) for x, y in zip(r1, r2)] for r1, r2 in zip(a, b)]


def alg_mat_sub(alg: AlgebraHandle, a: AlgMat, b: AlgMat) -> AlgMat:
    return [[alg.add(x, alg.neg(y)) for x, y in zip(r1, r2)]
            for r1, r2 in zip(a, b)]


def alg_mat_mul(alg: AlgebraHandle, a: AlgMat, b: AlgMat) -> AlgMat:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = alg.zero
            for k in range(inner):
                acc = alg.add(acc, alg.mul(a[i][k], b[k][j]))
            row.append(acc)
        out.append(row)
    return out


def alg_mat_eq(alg: AlgebraHandle, a: AlgMat, b: AlgMat) -> bool:
    return all(alg.eq(x, y) for r1, r2 in zip(a, b) for x, y in zip(r1, r2))


class AlgebraInversionError(ArithmeticError):
    """No pivoting sequence inverted the matrix over the algebra.

    This is a conservative report: over a general algebra, failure of the
    pivot search does not certify non-invertibility.
    """


def alg_mat_try_inverse(alg: AlgebraHandle, a: AlgMat) -> AlgMat | None:
    """Gauss-Jordan over the algebra with first-invertible-pivot search."""
    n = len(a)
    if n == 0:
        return []
    work = [list(row) for row in a]
    inv = alg_mat_eye(alg, n)
    for c in range(n):
        pivot_inv = None
        pivot_row = None
        for i in range(c, n):
            w = alg.try_invert(work[i][c])
            if w is not None:
                pivot_inv, pivot_row = w, i
                break
        if pivot_row is None:
            return None
        work[c], work[pivot_row] = work[pivot_row], work[c]
        inv[c], inv[pivot_row] = inv[pivot_row], inv[c]
        work[c] = [alg.mul(pivot_inv, x) for x in work[c]]
        inv[c] = [alg.mul(pivot_inv, x) for x in inv[c]]
        for i in range(n):
            if i == c:
                continue
            f = work[i][c]
            if alg.eq(f, alg.zero):
                continue
            work[i] = [alg.add(x, alg.neg(alg.mul(f, y)))
                       for x, y in zip(work[i], work[c])]
            inv[i] = [alg.add(x, alg.neg(alg.mul(f, y)))
                      for x, y in zip(inv[i], inv[c])]
    return inv


def alg_mat_flatten(a: AlgMat) -> Mat:
    """Flatten a matrix over MatrixAlgebra(n) into one big Mat (outer grid first)."""
    return Mat.from_blocks(a)


def kron_scalar_alg(alg: AlgebraHandle, scalar: Mat, element) -> AlgMat:
    """scalar (x) element: the grid [scalar_ij * element]."""
    return [[alg.smul(scalar.data[i][j], element) for j in range(scalar.cols)]
            for i in range(scalar.rows)]
