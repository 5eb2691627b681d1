"""Compiling expressions into realizations, minimization, and similarity.

The four structural builders (constant, variable, sum, product, inverse)
compose realizations so that evaluation is preserved; their correctness is
enforced by the oracle test suite rather than taken on faith.  Minimization
is the Kalman-style two-step reduction: restrict to the reachable span,
then quotient by the unobservable subspace, both computed by exact closure
iterations on basis units (multilinearity makes basis units sufficient).

``find_similarity`` decides whether two equal-size realizations are
conjugate by solving the full linear system in the unknown T and insisting
on a one-dimensional (projective) solution space, which is exactly the
uniqueness that minimal realizations of the same function enjoy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Sequence

from .expr import Const, Inv, NcExpr, Neg, Prod, Sum, Var
from .linalg import (BlockLinearMap, Mat, Rat, SingularMatrixError, det,
                     inverse, kernel_basis, kron, map_direct_sum, map_vstack,
                     rank, rref, solve)
from .realization import FMRealization


class CentreSingular(ArithmeticError):
    """The centre point is outside the expression's domain."""

    def __init__(self, path: tuple[int, ...]):
        super().__init__(f"centre is singular for the inversion at node path {path}")
        self.path = path


def _check_centre(y: Sequence[Mat], s: int, d: int) -> tuple[Mat, ...]:
    y = tuple(y)
    if len(y) != d:
        raise ValueError(f"centre must have {d} matrices")
    if any(m.shape != (s, s) for m in y):
        raise ValueError("centre matrices must be s x s")
    return y


# -- structural builders ----------------------------------------------


def realize_const(c: Rat, y: Sequence[Mat], s: int, d: int) -> FMRealization:
    """L = 0 realization of the constant c (value c*I at every point)."""
    y = _check_centre(y, s, d)
    zero_a = BlockLinearMap.zero(s, 0, 0)
    zero_b = BlockLinearMap.zero(s, 0, s)
    return FMRealization(d=d, s=s, L=0, Y=y,
                         D=Mat.identity(s).scale(Fraction(c)),
                         C=Mat.zero(s, 0),
                         A=(zero_a,) * d, B=(zero_b,) * d)


def realize_var(k: int, y: Sequence[Mat], s: int, d: int) -> FMRealization:
    """Realization of x_k: L = s, D = Y_k, C = I, B_k = id, everything else 0."""
    y = _check_centre(y, s, d)
    if not 1 <= k <= d:
        raise ValueError(f"variable index {k} out of range 1..{d}")
    zero_a = BlockLinearMap.zero(s, s, s)
    bs = tuple(BlockLinearMap.identity(s) if j == k - 1
               else BlockLinearMap.zero(s, s, s) for j in range(d))
    return FMRealization(d=d, s=s, L=s, Y=y, D=y[k - 1], C=Mat.identity(s),
                         A=(zero_a,) * d, B=bs)


def _require_compatible(r1: FMRealization, r2: FMRealization):
    if (r1.d, r1.s, r1.Y) != (r2.d, r2.s, r2.Y):
        raise ValueError("realizations must share (d, s, centre)")


def realize_sum(r1: FMRealization, r2: FMRealization) -> FMRealization:
    _require_compatible(r1, r2)
    a = tuple(map_direct_sum(a1, a2) for a1, a2 in zip(r1.A, r2.A))
    b = tuple(map_vstack(b1, b2) for b1, b2 in zip(r1.B, r2.B))
    return FMRealization(d=r1.d, s=r1.s, L=r1.L + r2.L, Y=r1.Y,
                         D=r1.D + r2.D, C=r1.C.hstack(r2.C), A=a, B=b)


def realize_product(r1: FMRealization, r2: FMRealization) -> FMRealization:
    _require_compatible(r1, r2)
    s = r1.s

    def a_k(a1: BlockLinearMap, b1: BlockLinearMap, a2: BlockLinearMap) -> BlockLinearMap:
        def f(z: Mat) -> Mat:
            top = a1(z).hstack(b1(z) * r2.C)
            bot = Mat.zero(r2.L, r1.L).hstack(a2(z))
            return top.vstack(bot)
        return BlockLinearMap.from_function(s, r1.L + r2.L, r1.L + r2.L, f)

    a = tuple(a_k(a1, b1, a2) for a1, b1, a2 in zip(r1.A, r1.B, r2.A))
    b = tuple(map_vstack(b1.right_mul(r2.D), b2) for b1, b2 in zip(r1.B, r2.B))
    return FMRealization(d=r1.d, s=s, L=r1.L + r2.L, Y=r1.Y,
                         D=r1.D * r2.D, C=r1.C.hstack(r1.D * r2.C), A=a, B=b)


def realize_scale(r: FMRealization, c: Rat) -> FMRealization:
    """c * r, used for negation without growing the state dimension."""
    c = Fraction(c)
    return FMRealization(d=r.d, s=r.s, L=r.L, Y=r.Y, D=r.D.scale(c),
                         C=r.C.scale(c), A=r.A, B=r.B)


def realize_inverse(r1: FMRealization, path: tuple[int, ...] = ()) -> FMRealization:
    """Inverse of a realization regular at the centre (D invertible)."""
    try:
        d_inv = inverse(r1.D)
    except SingularMatrixError:
        raise CentreSingular(path) from None
    s = r1.s
    corr = d_inv * r1.C

    def a_k(a1: BlockLinearMap, b1: BlockLinearMap) -> BlockLinearMap:
        def f(z: Mat) -> Mat:
            return a1(z) - b1(z) * corr
        return BlockLinearMap.from_function(s, r1.L, r1.L, f)

    a = tuple(a_k(a1, b1) for a1, b1 in zip(r1.A, r1.B))
    b = tuple(b1.right_mul(d_inv) for b1 in r1.B)
    return FMRealization(d=r1.d, s=s, L=r1.L, Y=r1.Y, D=d_inv,
                         C=-(d_inv * r1.C), A=a, B=b)


def realize_expr(e: NcExpr, y: Sequence[Mat], d: int | None = None,
                 minimize_result: bool = True) -> FMRealization:
    """Compile an expression into a (by default minimal) realization at y.

    Raises CentreSingular naming the inversion node when y is outside the
    expression's domain.
    """
    y = tuple(y)
    if d is None:
        d = max(e.arity(), len(y))
    s = y[0].rows
    y = _check_centre(y, s, d)

    def go(e: NcExpr, path: tuple[int, ...]) -> FMRealization:
        if isinstance(e, Const):
            return realize_const(e.value, y, s, d)
        if isinstance(e, Var):
            return realize_var(e.index, y, s, d)
        if isinstance(e, Sum):
            return realize_sum(go(e.left, path + (0,)), go(e.right, path + (1,)))
        if isinstance(e, Prod):
            return realize_product(go(e.left, path + (0,)), go(e.right, path + (1,)))
        if isinstance(e, Neg):
            return realize_scale(go(e.child, path + (0,)), Fraction(-1))
        if isinstance(e, Inv):
            return realize_inverse(go(e.child, path + (0,)), path)
        raise TypeError(f"unknown node {e!r}")

    r = go(e, ())
    return minimize(r) if minimize_result else r


# -- subspaces ---------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A subspace of K^L held as a reduced-column-echelon basis matrix."""

    ambient: int
    basis: Mat  # ambient x dim, canonical

    @property
    def dim(self) -> int:
        return self.basis.cols

    def contains(self, v: Mat) -> bool:
        return solve(self.basis, v) is not None if self.dim else v.is_zero()


def _echelon_span(ambient: int, vectors: list[Mat]) -> Subspace:
    """Canonical subspace spanned by the given column vectors."""
    if not vectors:
        return Subspace(ambient, Mat.zero(ambient, 0))
    stacked = Mat.from_blocks([[v for v in vectors]])
    # reduced column echelon = transpose of RREF of the transpose
    red, piv = rref(stacked.transpose())
    basis_rows = [red.row(i) for i in range(len(piv))]
    if not basis_rows:
        return Subspace(ambient, Mat.zero(ambient, 0))
    return Subspace(ambient, Mat(basis_rows).transpose())


def _basis_units(s: int) -> list[Mat]:
    return [Mat.unit(s, s, p, q) for p in range(s) for q in range(s)]


def controllability_span(r: FMRealization) -> Subspace:
    """Smallest A-invariant subspace containing all B_k(E_pq) columns."""
    units = _basis_units(r.s)
    vectors: list[Mat] = []
    for b in r.B:
        for u in units:
            img = b(u)
            vectors.extend(Mat.column(img.col(j)) for j in range(img.cols))
    span = _echelon_span(r.L, vectors)
    if r.L == 0:
        return span
    while True:
        new_vectors = [Mat.column(span.basis.col(j)) for j in range(span.dim)]
        grown = list(new_vectors)
        for a in r.A:
            for u in units:
                au = a(u)
                grown.extend(au * v for v in new_vectors)
        bigger = _echelon_span(r.L, grown)
        if bigger.dim == span.dim:
            return span
        span = bigger


def unobservable_subspace(r: FMRealization) -> Subspace:
    """Largest A-invariant subspace inside ker C (intersect-and-iterate)."""
    units = _basis_units(r.s)
    current = _echelon_span(r.L, kernel_basis(r.C))
    if r.L == 0:
        return current
    while True:
        if current.dim == 0:
            return current
        stack_rows = [r.C]
        if current.dim < r.L:
            # annihilator rows: N with ker N = current
            ann = Mat([list(v.col(0))
                       for v in kernel_basis(current.basis.transpose())],
                      r.L - current.dim, r.L)
            stack_rows.append(ann)
            for a in r.A:
                for u in units:
                    stack_rows.append(ann * a(u))
        big = stack_rows[0]
        for m in stack_rows[1:]:
            big = big.vstack(m)
        refined = _echelon_span(r.L, kernel_basis(big))
        if refined.dim == current.dim:
            return current
        current = refined


def is_controllable(r: FMRealization) -> bool:
    return controllability_span(r).dim == r.L


def is_observable(r: FMRealization) -> bool:
    return unobservable_subspace(r).dim == 0


# -- minimization ------------------------------------------------------


def _complete_basis(partial: Mat, ambient: int) -> Mat:
    """Extend echelon columns by standard unit vectors, in index order."""
    cols = [Mat.column(partial.col(j)) for j in range(partial.cols)]
    current = _echelon_span(ambient, cols)
    order = list(range(ambient))
    full_cols = list(cols)
    for i in order:
        if current.dim == ambient:
            break
        cand = Mat.unit(ambient, 1, i, 0)
        bigger = _echelon_span(ambient, full_cols + [cand])
        if bigger.dim > current.dim:
            full_cols.append(cand)
            current = bigger
    return Mat.from_blocks([full_cols]) if full_cols else Mat.zero(ambient, 0)


def _restrict_to_span(r: FMRealization, span: Subspace) -> FMRealization:
    """Restrict the state space to an A-invariant span containing the B images."""
    v = span.basis
    if span.dim == r.L:
        return r
    units = _basis_units(r.s)
    new_l = span.dim

    def restrict_map(t: BlockLinearMap, out_cols_from_span: bool) -> BlockLinearMap:
        imgs = []
        for p in range(r.s):
            row = []
            for q in range(r.s):
                img = t.images[p][q]
                target = img * v if out_cols_from_span else img
                sol = solve(v, target)
                if sol is None:
                    raise AssertionError("span is not invariant; closure bug")
                row.append(sol)
            imgs.append(row)
        return BlockLinearMap(r.s, new_l, new_l if out_cols_from_span else t.c_out,
                              imgs)

    a = tuple(restrict_map(ak, True) for ak in r.A)
    b = tuple(restrict_map(bk, False) for bk in r.B)
    return FMRealization(d=r.d, s=r.s, L=new_l, Y=r.Y, D=r.D, C=r.C * v, A=a, B=b)


def _quotient_unobservable(r: FMRealization, unobs: Subspace) -> FMRealization:
    """Quotient the state space by an A-invariant subspace inside ker C."""
    w = unobs.dim
    if w == 0:
        return r
    t = _complete_basis(unobs.basis, r.L)
    t_inv = inverse(t)
    new_l = r.L - w
    bottom = t_inv.submatrix(w, 0, new_l, r.L)
    right = t.submatrix(0, w, r.L, new_l)

    def quotient_map(m: Mat, square: bool) -> Mat:
        # invariance kills the (bottom, left) block, so the quotient action
        # is the bottom-right corner of T^{-1} M T (or T^{-1} M for B maps)
        return bottom * m * right if square else bottom * m

    a = tuple(BlockLinearMap(r.s, new_l, new_l,
                             [[quotient_map(ak.images[p][q], True)
                               for q in range(r.s)] for p in range(r.s)])
              for ak in r.A)
    b = tuple(BlockLinearMap(r.s, new_l, r.s,
                             [[quotient_map(bk.images[p][q], False)
                               for q in range(r.s)] for p in range(r.s)])
              for bk in r.B)
    c = r.C * right
    return FMRealization(d=r.d, s=r.s, L=new_l, Y=r.Y, D=r.D, C=c, A=a, B=b)


def minimize(r: FMRealization) -> FMRealization:
    """Controllability restriction first, then observability quotient."""
    reduced = _restrict_to_span(r, controllability_span(r))
    return _quotient_unobservable(reduced, unobservable_subspace(reduced))


# -- truncated controllability / observability matrices ----------------


def _words_up_to(d: int, max_len: int) -> list[tuple[int, ...]]:
    words: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(max_len):
        frontier = [w + (k,) for w in frontier for k in range(d)]
        words.extend(frontier)
    return words


def _a_word(r: FMRealization, word: tuple[int, ...], zs: Sequence[Mat]) -> Mat:
    """A^w(Z_1..Z_l) = A_{w1}(Z_1) ... A_{wl}(Z_l) (identity for the empty word)."""
    out = Mat.identity(r.L)
    for letter, z in zip(word, zs):
        out = out * r.A[letter](z)
    return out


def controllability_matrix_trunc(r: FMRealization, ell: int) -> Mat:
    """Row of blocks A^w B_k on basis tuples, over |w| <= ell and k."""
    units = _basis_units(r.s)
    blocks: list[Mat] = []
    for word in _words_up_to(r.d, ell):
        for k in range(r.d):
            for zs in iter_product(units, repeat=len(word) + 1):
                blocks.append(_a_word(r, word, zs[:-1]) * r.B[k](zs[-1]))
    if not blocks:
        return Mat.zero(r.L, 0)
    return Mat.from_blocks([blocks])


def observability_matrix_trunc(r: FMRealization, ell: int) -> Mat:
    """Column of blocks C A^w on basis tuples, over |w| <= ell."""
    units = _basis_units(r.s)
    blocks: list[Mat] = []
    for word in _words_up_to(r.d, ell):
        for zs in iter_product(units, repeat=len(word)):
            blocks.append(r.C * _a_word(r, word, zs))
    out = blocks[0]
    for b in blocks[1:]:
        out = out.vstack(b)
    return out


# -- similarity --------------------------------------------------------


def _vec_r(m: Mat) -> list[Rat]:
    return [x for row in m.data for x in row]


def find_similarity(r1: FMRealization, r2: FMRealization) -> Mat | None:
    """The unique invertible T with C2 T = C1, B2 = T B1, A2 T = T A1, or None.

    Solved as one exact linear system over all basis units; the solution
    space (projectivized with the inhomogeneous side) must have dimension
    exactly one, which certifies uniqueness.
    """
    _require_compatible(r1, r2)
    if r1.L != r2.L or r1.D != r2.D:
        return None
    L, s = r1.L, r1.s
    if L == 0:
        return Mat.zero(0, 0)
    units = _basis_units(s)
    rows: list[list[Rat]] = []
    n_unknowns = L * L + 1  # vec_r(T) plus the homogenizing scalar t

    # C2 T = C1  ->  (C2 (x) I_L) vec(T) = vec(C1)
    eye_l = Mat.identity(L)
    lhs = kron(r2.C, eye_l)
    rhs = _vec_r(r1.C)
    for i in range(lhs.rows):
        rows.append(list(lhs.data[i]) + [-rhs[i]])
    # T B1(E) = B2(E)  ->  (I_L (x) B1(E)^T) vec(T) = vec(B2(E))
    for b1, b2 in zip(r1.B, r2.B):
        for u in units:
            lhs = kron(eye_l, b1(u).transpose())
            rhs = _vec_r(b2(u))
            for i in range(lhs.rows):
                rows.append(list(lhs.data[i]) + [-rhs[i]])
    # A2(E) T - T A1(E) = 0  ->  (A2(E) (x) I - I (x) A1(E)^T) vec(T) = 0
    for a1, a2 in zip(r1.A, r2.A):
        for u in units:
            lhs = kron(a2(u), eye_l) - kron(eye_l, a1(u).transpose())
            for i in range(lhs.rows):
                rows.append(list(lhs.data[i]) + [Fraction(0)])

    system = Mat(rows, len(rows), n_unknowns)
    null = kernel_basis(system)
    if len(null) != 1:
        return None
    vec = null[0]
    t_scalar = vec.data[L * L][0]
    if t_scalar == 0:
        return None
    t = Mat.from_flat(L, L, [vec.data[i][0] / t_scalar for i in range(L * L)])
    if det(t) == 0:
        return None
    # the relations hold by construction; assert them anyway, exactly
    assert r2.C * t == r1.C
    for b1, b2 in zip(r1.B, r2.B):
        for u in units:
            assert t * b1(u) == b2(u)
    for a1, a2 in zip(r1.A, r2.A):
        for u in units:
            assert a2(u) * t == t * a1(u)
    return t
