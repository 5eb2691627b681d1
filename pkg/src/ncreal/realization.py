"""State-space realizations of nc rational functions around a matrix centre.

A realization with state dimension L, centred at a d-tuple Y of s x s
matrices, is the data (s, d, L, Y, D, C, A_1..A_d, B_1..B_d) where the A_k
and B_k are linear maps on s x s blocks.  At a point X of d-tuples of
sm x sm matrices the pencil is

    Lambda(X) = I_{Lm} - sum_k (X_k - I_m (x) Y_k) A_k      (blockwise)

and the value, defined whenever the pencil is invertible, is

    I_m (x) D + (I_m (x) C) Lambda(X)^{-1} sum_k (X_k - I_m (x) Y_k) B_k.

L = 0 is allowed (empty pencil with determinant 1; the value is the
constant I_m (x) D), so constants and the zero function have honest
minimal realizations.

Evaluation at a level n that is not a multiple of s goes through the point
I_s (x) X: for realizations whose coefficients satisfy the linearized
compatibility equations (see :mod:`ncreal.calculus`) the result carries an
exact I_s (x) . pattern whose repeated block is the value.  A missing
pattern is reported as :class:`ScalarStructureViolation` instead of
returning garbage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from . import algebra as alg_mod
from .algebra import (AlgebraHandle, AlgMat, alg_mat_add, alg_mat_eye,
                      alg_mat_from_scalar, alg_mat_mul, alg_mat_sub,
                      alg_mat_try_inverse)
from .linalg import (BlockLinearMap, Mat, Rat, block_apply, det, format_rat,
                     kron, rat, solve_square)


class SingularPencil(ArithmeticError):
    """The realization's pencil is singular at the requested point."""


class ScalarStructureViolation(ArithmeticError):
    """Evaluation at I_s (x) X did not produce an I_s (x) . pattern.

    For compiled (hence compatible) realizations this cannot happen; seeing
    it signals that the coefficients violate the linearized compatibility
    equations.
    """


class AlgebraSingular(ArithmeticError):
    """Pivot search failed to invert the pencil over the algebra.

    Conservative: over a general algebra this does not certify that the
    point is outside the algebra domain.
    """


@dataclass(frozen=True)
class FMRealization:
    d: int
    s: int
    L: int
    Y: tuple[Mat, ...]
    D: Mat
    C: Mat
    A: tuple[BlockLinearMap, ...]
    B: tuple[BlockLinearMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "Y", tuple(self.Y))
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "B", tuple(self.B))
        s, L, d = self.s, self.L, self.d
        if len(self.Y) != d or len(self.A) != d or len(self.B) != d:
            raise ValueError("need d centre matrices and d coefficient maps")
        if any(y.shape != (s, s) for y in self.Y):
            raise ValueError("centre matrices must be s x s")
        if self.D.shape != (s, s):
            raise ValueError("D must be s x s")
        if self.C.shape != (s, L):
            raise ValueError("C must be s x L")
        for a in self.A:
            if (a.s_in, a.r_out, a.c_out) != (s, L, L):
                raise ValueError("A_k must map s x s blocks to L x L")
        for b in self.B:
            if (b.s_in, b.r_out, b.c_out) != (s, L, s):
                raise ValueError("B_k must map s x s blocks to L x s")

    # -- core evaluation ------------------------------------------------

    def _blocks(self, x: Sequence[Mat]) -> tuple[tuple[Mat, ...], int]:
        x = tuple(x)
        if len(x) != self.d:
            raise ValueError(f"point has {len(x)} matrices, expected {self.d}")
        n = x[0].rows
        if any(m.shape != (n, n) for m in x):
            raise ValueError("point matrices must be square of equal size")
        if self.s == 0 or n % self.s:
            raise ValueError(f"level {n} is not a multiple of the centre size {self.s}")
        return x, n // self.s

    def shifted(self, x: Sequence[Mat]) -> tuple[Mat, ...]:
        """The translated point X - I_m (x) Y."""
        x, m = self._blocks(x)
        eye = Mat.identity(m)
        return tuple(xk - kron(eye, yk) for xk, yk in zip(x, self.Y))


def pencil(r: FMRealization, x: Sequence[Mat]) -> Mat:
    """Lambda(X) = I_{Lm} - sum_k (X_k - I_m (x) Y_k) A_k."""
    _, m = r._blocks(x)
    out = Mat.identity(r.L * m)
    for w, a in zip(r.shifted(x), r.A):
        out = out - block_apply(a, w, m)
    return out


def in_domain(r: FMRealization, x: Sequence[Mat]) -> bool:
    """True iff the pencil is invertible at x (vacuously true when L = 0)."""
    return det(pencil(r, x)) != 0


def eval_realization(r: FMRealization, x: Sequence[Mat]) -> Mat:
    """Evaluate at a point of level s*m; raises SingularPencil off-domain."""
    _, m = r._blocks(x)
    shifted = r.shifted(x)
    rhs = Mat.zero(r.L * m, r.s * m)
    for w, b in zip(shifted, r.B):
        rhs = rhs + block_apply(b, w, m)
    lam = Mat.identity(r.L * m)
    for w, a in zip(shifted, r.A):
        lam = lam - block_apply(a, w, m)
    solved = solve_square(lam, rhs)
    if solved is None:
        raise SingularPencil(f"pencil singular at level {r.s * m}")
    eye = Mat.identity(m)
    return kron(eye, r.D) + kron(eye, r.C) * solved


def eval_at_level_n(r: FMRealization, x: Sequence[Mat]) -> Mat:
    """Evaluate at an arbitrary level n through the point I_s (x) X.

    Returns the n x n value; raises SingularPencil if I_s (x) X is outside
    the domain and ScalarStructureViolation if the I_s (x) . pattern fails.
    """
    x = tuple(x)
    if len(x) != r.d:
        raise ValueError(f"point has {len(x)} matrices, expected {r.d}")
    n = x[0].rows
    eye_s = Mat.identity(r.s)
    lifted = tuple(kron(eye_s, xk) for xk in x)
    big = eval_realization(r, lifted)
    top = big.submatrix(0, 0, n, n)
    if big != kron(eye_s, top):
        raise ScalarStructureViolation(
            f"value at I_{r.s} (x) X lacks the scalar block pattern")
    return top


def scalar_extract(m: AlgMat, s: int, alg: AlgebraHandle):
    """Return f with m = I_s (x) f, or None if the pattern fails."""
    if len(m) != s or any(len(row) != s for row in m):
        raise ValueError("expected an s x s array over the algebra")
    f = m[0][0]
    for i in range(s):
        for j in range(s):
            expected = f if i == j else alg.zero
            if not alg.eq(m[i][j], expected):
                return None
    return f


def _apply_map_algebra(t: BlockLinearMap, a: AlgMat, alg: AlgebraHandle) -> AlgMat:
    """(A)T over the algebra: sum_{p,q} T(E_pq) (x) a_pq."""
    s = t.s_in
    out = alg_mod.alg_mat_zero(alg, t.r_out, t.c_out)
    for p in range(s):
        for q in range(s):
            img = t.images[p][q]
            el = a[p][q]
            if alg.eq(el, alg.zero):
                continue
            for u in range(t.r_out):
                for v in range(t.c_out):
                    w = img.data[u][v]
                    if w:
                        out[u][v] = alg.add(out[u][v], alg.smul(w, el))
    return out


def algebra_pencil(r: FMRealization, a: Sequence[AlgMat], alg: AlgebraHandle) -> AlgMat:
    """Lambda over the algebra at a d-tuple of s x s arrays of elements."""
    lam = alg_mat_eye(alg, r.L)
    for ak, amap, yk in zip(a, r.A, r.Y):
        shifted = alg_mat_sub(alg, [list(row) for row in ak],
                              alg_mat_from_scalar(alg, yk))
        lam = alg_mat_sub(alg, lam, _apply_map_algebra(amap, shifted, alg))
    return lam


def eval_algebra(r: FMRealization, a: Sequence[AlgMat], alg: AlgebraHandle) -> AlgMat:
    """Evaluate over a unital algebra; raises AlgebraSingular on pivot failure.

    ``a`` is a d-tuple of s x s arrays of algebra elements.  The result is
    an s x s array over the algebra.
    """
    a = [([list(row) for row in ak]) for ak in a]
    if len(a) != r.d:
        raise ValueError(f"expected {r.d} algebra arrays")
    lam = algebra_pencil(r, a, alg)
    lam_inv = alg_mat_try_inverse(alg, lam)
    if lam_inv is None:
        raise AlgebraSingular("no pivoting sequence inverts the pencil")
    rhs = alg_mod.alg_mat_zero(alg, r.L, r.s)
    for ak, bmap, yk in zip(a, r.B, r.Y):
        shifted = alg_mat_sub(alg, ak, alg_mat_from_scalar(alg, yk))
        rhs = alg_mat_add(alg, rhs, _apply_map_algebra(bmap, shifted, alg))
    out = alg_mat_from_scalar(alg, r.D)
    c_alg = alg_mat_from_scalar(alg, r.C)
    prod = alg_mat_mul(alg, c_alg, alg_mat_mul(alg, lam_inv, rhs))
    return alg_mat_add(alg, out, prod)


def in_algebra_domain(r: FMRealization, a: Sequence[AlgMat], alg: AlgebraHandle) -> bool:
    """True if the pivot search inverts the pencil (conservative)."""
    a = [([list(row) for row in ak]) for ak in a]
    return alg_mat_try_inverse(alg, algebra_pencil(r, a, alg)) is not None


# -- JSON schema ------------------------------------------------------


def mat_to_json(m: Mat) -> list[list[str]]:
    return [[format_rat(x) for x in row] for row in m.data]


def mat_from_json(rows: list[list[str]], shape: tuple[int, int] | None = None) -> Mat:
    if shape is not None and not rows:
        return Mat.zero(*shape)
    m = Mat([[rat(x) for x in row] for row in rows])
    if shape is not None and m.shape != shape:
        # zero-dimension matrices serialize as empty lists; rebuild by shape
        if m.rows == 0 or m.cols == 0:
            return Mat.zero(*shape)
        raise ValueError(f"matrix shape {m.shape} != expected {shape}")
    return m


def _map_to_json(t: BlockLinearMap) -> list[list[list[str]]]:
    # basis images in (p, q) row-major order
    return [mat_to_json(t.images[p][q]) for p in range(t.s_in)
            for q in range(t.s_in)]


def _map_from_json(images: list, s: int, r_out: int, c_out: int) -> BlockLinearMap:
    if len(images) != s * s:
        raise ValueError(f"expected {s * s} basis images, found {len(images)}")
    table = [[mat_from_json(images[p * s + q], (r_out, c_out))
              for q in range(s)] for p in range(s)]
    return BlockLinearMap(s, r_out, c_out, table)


def realization_to_dict(r: FMRealization) -> dict:
    return {
        "d": r.d, "s": r.s, "L": r.L,
        "Y": [mat_to_json(y) for y in r.Y],
        "D": mat_to_json(r.D),
        "C": mat_to_json(r.C),
        "A": [_map_to_json(a) for a in r.A],
        "B": [_map_to_json(b) for b in r.B],
    }


def realization_from_dict(data: dict) -> FMRealization:
    d, s, L = int(data["d"]), int(data["s"]), int(data["L"])
    return FMRealization(
        d=d, s=s, L=L,
        Y=tuple(mat_from_json(y, (s, s)) for y in data["Y"]),
        D=mat_from_json(data["D"], (s, s)),
        C=mat_from_json(data["C"], (s, L)),
        A=tuple(_map_from_json(a, s, L, L) for a in data["A"]),
        B=tuple(_map_from_json(b, s, L, s) for b in data["B"]),
    )


def realization_to_json(r: FMRealization, indent: int | None = None) -> str:
    return json.dumps(realization_to_dict(r), indent=indent, sort_keys=True)


def realization_from_json(text: str) -> FMRealization:
    return realization_from_dict(json.loads(text))
